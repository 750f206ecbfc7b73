#include "jsonio.hpp"

#include "errors.hpp"
#include "parse.hpp"

namespace itflow::jsonio {

Json vec3_json(const math::Vec3& v) { return Json::array({v.x, v.y, v.z}); }
Json quat_json(const math::Quat& q) { return Json::array({q.w, q.x, q.y, q.z}); }

namespace {

const char* kind_name(PortKind kind) {
  switch (kind) {
    case PortKind::Locator: return "locator";
    case PortKind::Valuator: return "valuator";
    case PortKind::Button: return "button";
    case PortKind::Pick: return "pick";
  }
  return "?";
}

void expect_numbers(const Json& arr, std::size_t n, const std::string& what) {
  if (!arr.is_array() || arr.size() != n)
    fail(Err::ParseError, what + ": expected an array of " + std::to_string(n) + " numbers");
  for (const Json& v : arr)
    if (!v.is_number())
      fail(Err::ParseError, what + ": expected an array of " + std::to_string(n) + " numbers");
}

}  // namespace

math::Vec3 vec3_from(const Json& arr, const std::string& what) {
  expect_numbers(arr, 3, what);
  return {arr[0].get<double>(), arr[1].get<double>(), arr[2].get<double>()};
}

math::Quat quat_from(const Json& arr, const std::string& what) {
  expect_numbers(arr, 4, what);
  return sanitize_quat({arr[0].get<double>(), arr[1].get<double>(), arr[2].get<double>(),
                        arr[3].get<double>()},
                       what);
}

void write_sample(Json& out, const Sample& sample) {
  out["kind"] = kind_name(kind_of(sample));
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Locator>) {
          out["pos"] = vec3_json(s.position);
          out["orient"] = quat_json(s.orientation);
        } else if constexpr (std::is_same_v<T, Valuator>) {
          out["value"] = s.value;
        } else if constexpr (std::is_same_v<T, Button>) {
          out["id"] = s.id;
          out["pressed"] = s.pressed;
        } else {
          out["target"] = s.target ? Json(*s.target) : Json(nullptr);
        }
      },
      sample);
}

Sample read_sample(const Json& record, const std::string& kind, const std::string& fallback_id,
                   const std::string& what) {
  if (kind == "locator") {
    auto pos = record.find("pos");
    if (pos == record.end()) fail(Err::ParseError, what + ": locator sample needs 'pos'");
    Locator loc;
    loc.position = vec3_from(*pos, what + ": pos");
    if (auto orient = record.find("orient"); orient != record.end())
      loc.orientation = quat_from(*orient, what + ": orient");
    return loc;
  }
  if (kind == "valuator") {
    auto value = record.find("value");
    if (value == record.end() || !value->is_number())
      fail(Err::ParseError, what + ": valuator sample needs a numeric 'value'");
    return Valuator{value->get<double>()};
  }
  if (kind == "button") {
    auto pressed = record.find("pressed");
    if (pressed == record.end() || !pressed->is_boolean())
      fail(Err::ParseError, what + ": button sample needs a boolean 'pressed'");
    Button b{fallback_id, pressed->get<bool>()};
    if (auto id = record.find("id"); id != record.end()) {
      if (!id->is_string()) fail(Err::ParseError, what + ": button 'id' must be a string");
      b.id = id->get<std::string>();
    }
    return b;
  }
  if (kind == "pick") {
    Pick p;
    if (auto target = record.find("target"); target != record.end() && !target->is_null()) {
      if (!target->is_string()) fail(Err::ParseError, what + ": pick 'target' must be a string or null");
      p.target = target->get<std::string>();
    }
    return p;
  }
  fail(Err::UnknownSampleKind, what + ": unknown sample kind '" + kind + "'");
}

}  // namespace itflow::jsonio
