#pragma once

#include <string>

#include <json.hpp>

#include "sample.hpp"

namespace itflow::jsonio {

// ordered_json keeps insertion order, so serialized records are byte-stable.
using Json = nlohmann::ordered_json;

Json vec3_json(const math::Vec3& v);
Json quat_json(const math::Quat& q);
math::Vec3 vec3_from(const Json& arr, const std::string& what);
math::Quat quat_from(const Json& arr, const std::string& what);

// Appends "kind" plus the payload fields for the sample's kind.
void write_sample(Json& out, const Sample& sample);

// Reads the payload fields named by `kind` out of `record`. `fallback_id`
// fills a button sample's id when the record omits it.
Sample read_sample(const Json& record, const std::string& kind, const std::string& fallback_id,
                   const std::string& what);

}  // namespace itflow::jsonio
