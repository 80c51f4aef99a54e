#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

#include "locus/dispatch.hpp"
#include "locus/model.hpp"
#include "locus/scheduler.hpp"

namespace locus {

using Json = nlohmann::json;

struct ParseOptions {
    bool strict = false;  // reject unknown fields
};

/// Parses a portfolio document. Throws Error(PARSE_ERROR) for malformed
/// documents, Error(UNKNOWN_FIELD) in strict mode and Error(COORD_RANGE)
/// for invalid coordinates. Range rules are left to validate().
Portfolio parse_portfolio(std::string_view bytes, ParseOptions options = {});
Portfolio portfolio_from_json(const Json& doc, ParseOptions options = {});
Project project_from_json(const Json& doc, ParseOptions options = {});
Resource resource_from_json(const Json& doc, ParseOptions options = {});
GeoPoint geopoint_from_json(const Json& doc);

Json to_json(const GeoPoint& p);
Json to_json(const Activity& a);
Json to_json(const Resource& r);
Json to_json(const Project& p);
Json to_json(const Portfolio& p);
std::string serialize_portfolio(const Portfolio& p);

Json to_json(const ValidationFinding& f);
Json to_json(const CpmResult& r);
Json to_json(const TravelLeg& leg);
Json to_json(const Schedule& s);
Schedule schedule_from_json(const Json& doc);
Json to_json(const CostReport& c);
Json to_json(const Alert& a);
Alert alert_from_json(const Json& doc);
Json to_json(const BucketResponse& r);
BucketResponse bucket_response_from_json(const Json& doc);

std::string_view to_string(EntryState state);
std::string_view to_string(ResourceStatus status);

}  // namespace locus
