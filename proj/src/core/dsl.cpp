#include "dsl.hpp"

#include <algorithm>
#include <set>

#include <json.hpp>

#include "filters.hpp"
#include "parse.hpp"
#include "xml.hpp"

namespace itflow::dsl {

namespace {

using xml::XmlAttr;
using xml::XmlElement;

[[noreturn]] void parse_fail(Err code, const std::string& message, int line) {
  fail(code, message + " at line " + std::to_string(line));
}

const std::string& require_attr(const XmlElement& el, const char* name) {
  const XmlAttr* a = el.attr(name);
  if (!a)
    parse_fail(Err::MissingAttribute, "<" + el.name + "> requires attribute '" + name + "'",
               el.line);
  return a->value;
}

void check_attrs(const XmlElement& el, std::initializer_list<std::string_view> allowed) {
  for (const XmlAttr& a : el.attrs) {
    bool known = false;
    for (std::string_view name : allowed) {
      if (a.name == name) {
        known = true;
        break;
      }
    }
    if (!known)
      parse_fail(Err::UnknownElement, "unknown attribute '" + a.name + "' on <" + el.name + ">",
                 a.line);
  }
}

void check_no_children(const XmlElement& el) {
  if (!el.children.empty())
    parse_fail(Err::UnknownElement,
               "<" + el.children.front().name + "> is not allowed inside <" + el.name + ">",
               el.children.front().line);
}

template <typename F>
auto attr_value(const XmlElement& el, const char* name, F&& parse) {
  const std::string& raw = require_attr(el, name);
  try {
    return parse(raw);
  } catch (const Error&) {
    parse_fail(Err::XmlSyntax, "bad value '" + raw + "' for attribute '" + name + "' on <" +
                                   el.name + ">",
               el.line);
  }
}

double attr_double(const XmlElement& el, const char* name) {
  return attr_value(el, name, [&](const std::string& v) { return parse_double(v, name); });
}
bool attr_bool(const XmlElement& el, const char* name) {
  return attr_value(el, name, [&](const std::string& v) { return parse_bool(v, name); });
}
math::Vec3 attr_vec3(const XmlElement& el, const char* name) {
  return attr_value(el, name, [&](const std::string& v) { return parse_vec3(v, name); });
}
math::Quat attr_quat(const XmlElement& el, const char* name) {
  return attr_value(el, name, [&](const std::string& v) { return parse_quat(v, name); });
}

ParamDecl parse_param(const XmlElement& el) {
  check_attrs(el, {"name", "value"});
  check_no_children(el);
  return {require_attr(el, "name"), require_attr(el, "value"), el.line};
}

PortDecl parse_port(const XmlElement& el) {
  check_attrs(el, {"name", "type"});
  check_no_children(el);
  return {require_attr(el, "name"), require_attr(el, "type"), el.line};
}

ClassDecl parse_class(const XmlElement& el) {
  check_attrs(el, {"name", "inherits"});
  ClassDecl cls;
  cls.line = el.line;
  cls.name = require_attr(el, "name");
  if (const XmlAttr* a = el.attr("inherits")) cls.inherits = a->value;
  for (const XmlElement& child : el.children) {
    if (child.name == "prop") {
      check_attrs(child, {"name", "type", "access"});
      check_no_children(child);
      PropDecl prop{require_attr(child, "name"), require_attr(child, "type"), "", child.line};
      if (const XmlAttr* a = child.attr("access")) prop.access = a->value;
      cls.props.push_back(std::move(prop));
    } else if (child.name == "iport") {
      cls.iports.push_back(parse_port(child));
    } else if (child.name == "oport") {
      cls.oports.push_back(parse_port(child));
    } else {
      parse_fail(Err::UnknownElement, "<" + child.name + "> is not allowed inside <class>",
                 child.line);
    }
  }
  return cls;
}

InstanceDecl parse_object(const XmlElement& el) {
  check_attrs(el, {"name", "type", "pos", "orient", "halfextents", "visible", "selectable",
                   "bboxvisible"});
  check_no_children(el);
  InstanceDecl d;
  d.kind = InstanceKind::Object;
  d.line = el.line;
  d.name = require_attr(el, "name");
  d.type = require_attr(el, "type");
  if (el.attr("pos")) d.pos = attr_vec3(el, "pos");
  if (el.attr("orient")) d.orient = attr_quat(el, "orient");
  if (el.attr("halfextents")) d.halfextents = attr_vec3(el, "halfextents");
  if (el.attr("visible")) d.visible = attr_bool(el, "visible");
  if (el.attr("selectable")) d.selectable = attr_bool(el, "selectable");
  if (el.attr("bboxvisible")) d.bbox_visible = attr_bool(el, "bboxvisible");
  return d;
}

std::vector<ParamDecl> parse_params(const XmlElement& el) {
  std::vector<ParamDecl> out;
  for (const XmlElement& child : el.children) {
    if (child.name != "param")
      parse_fail(Err::UnknownElement, "<" + child.name + "> is not allowed inside <" + el.name + ">",
                 child.line);
    out.push_back(parse_param(child));
  }
  return out;
}

InstanceDecl parse_videv(const XmlElement& el) {
  check_attrs(el, {"name", "type", "mode"});
  InstanceDecl d;
  d.kind = InstanceKind::Videv;
  d.line = el.line;
  d.name = require_attr(el, "name");
  d.type = require_attr(el, "type");
  if (const XmlAttr* a = el.attr("mode")) d.mode = a->value;
  d.params = parse_params(el);
  return d;
}

InstanceDecl parse_node(const XmlElement& el, InstanceKind kind) {
  check_attrs(el, {"name", "type", "enabled"});
  InstanceDecl d;
  d.kind = kind;
  d.line = el.line;
  d.name = require_attr(el, "name");
  d.type = require_attr(el, "type");
  if (el.attr("enabled")) d.enabled = attr_bool(el, "enabled");
  d.params = parse_params(el);
  return d;
}

DataflowRel parse_rel(const XmlElement& el) {
  check_attrs(el, {"origin", "srcport", "dest", "dstport"});
  check_no_children(el);
  return {require_attr(el, "origin"), require_attr(el, "srcport"), require_attr(el, "dest"),
          require_attr(el, "dstport"), el.line};
}

PathDecl parse_path(const XmlElement& el) {
  check_attrs(el, {"halfwidth"});
  PathDecl p;
  p.line = el.line;
  p.half_width = attr_double(el, "halfwidth");
  for (const XmlElement& child : el.children) {
    if (child.name != "v")
      parse_fail(Err::UnknownElement, "<" + child.name + "> is not allowed inside <path>",
                 child.line);
    check_attrs(child, {"pos"});
    check_no_children(child);
    p.vertices.push_back(attr_vec3(child, "pos"));
  }
  return p;
}

}  // namespace

WorldSpec parse_world(std::string_view text) {
  const XmlElement root = xml::parse(text);
  if (root.name != "world")
    parse_fail(Err::UnknownElement, "expected <world> as the root element, got <" + root.name + ">",
               root.line);
  check_attrs(root, {"name"});

  WorldSpec w;
  if (const XmlAttr* a = root.attr("name")) w.name = a->value;

  std::set<std::string> names;
  auto add_instance = [&](InstanceDecl d) {
    if (!names.insert(d.name).second)
      parse_fail(Err::DuplicateName, "duplicate instance name '" + d.name + "'", d.line);
    w.instances.push_back(std::move(d));
  };

  for (const XmlElement& child : root.children) {
    if (child.name == "class") {
      w.classes.push_back(parse_class(child));
    } else if (child.name == "object") {
      add_instance(parse_object(child));
    } else if (child.name == "videv") {
      add_instance(parse_videv(child));
    } else if (child.name == "it") {
      add_instance(parse_node(child, InstanceKind::IT));
    } else if (child.name == "filter") {
      add_instance(parse_node(child, InstanceKind::Filter));
    } else if (child.name == "dataflowRel") {
      w.rels.push_back(parse_rel(child));
    } else if (child.name == "viewpoint") {
      if (w.viewpoint)
        parse_fail(Err::DuplicateName, "<viewpoint> appears more than once", child.line);
      check_attrs(child, {"pos", "orient"});
      check_no_children(child);
      scene::Transform t;
      if (child.attr("pos")) t.position = attr_vec3(child, "pos");
      if (child.attr("orient")) t.orientation = attr_quat(child, "orient");
      w.viewpoint = t;
    } else if (child.name == "frustum") {
      if (w.frustum) parse_fail(Err::DuplicateName, "<frustum> appears more than once", child.line);
      check_attrs(child, {"fovy", "aspect", "near", "far"});
      check_no_children(child);
      scene::Frustum f;
      if (child.attr("fovy")) f.fov_y_deg = attr_double(child, "fovy");
      if (child.attr("aspect")) f.aspect = attr_double(child, "aspect");
      if (child.attr("near")) f.near_dist = attr_double(child, "near");
      if (child.attr("far")) f.far_dist = attr_double(child, "far");
      w.frustum = f;
    } else if (child.name == "path") {
      w.paths.push_back(parse_path(child));
    } else {
      parse_fail(Err::UnknownElement, "<" + child.name + "> is not allowed inside <world>",
                 child.line);
    }
  }
  return w;
}

namespace {

std::string num(double v) { return nlohmann::json(v).dump(); }
std::string vec(const math::Vec3& v) { return num(v.x) + " " + num(v.y) + " " + num(v.z); }
std::string quat(const math::Quat& q) {
  return num(q.w) + " " + num(q.x) + " " + num(q.y) + " " + num(q.z);
}
std::string attr(const char* name, const std::string& value) {
  return std::string(" ") + name + "=\"" + xml::escape(value) + "\"";
}

void write_params(std::string& out, const std::vector<ParamDecl>& params, const char* open,
                  const char* tag) {
  if (params.empty()) {
    out += "/>\n";
    return;
  }
  out += ">\n";
  for (const ParamDecl& p : params)
    out += std::string(open) + "<param" + attr("name", p.name) + attr("value", p.value) + "/>\n";
  out += std::string(open).substr(2) + "</" + tag + ">\n";
}

}  // namespace

std::string serialize_world(const WorldSpec& w) {
  std::string out = "<?xml version=\"1.0\"?>\n<world";
  if (!w.name.empty()) out += attr("name", w.name);
  out += ">\n";

  for (const ClassDecl& cls : w.classes) {
    out += "  <class" + attr("name", cls.name);
    if (!cls.inherits.empty()) out += attr("inherits", cls.inherits);
    if (cls.props.empty() && cls.iports.empty() && cls.oports.empty()) {
      out += "/>\n";
      continue;
    }
    out += ">\n";
    for (const PropDecl& p : cls.props) {
      out += "    <prop" + attr("name", p.name) + attr("type", p.type);
      if (!p.access.empty()) out += attr("access", p.access);
      out += "/>\n";
    }
    for (const PortDecl& p : cls.iports)
      out += "    <iport" + attr("name", p.name) + attr("type", p.type) + "/>\n";
    for (const PortDecl& p : cls.oports)
      out += "    <oport" + attr("name", p.name) + attr("type", p.type) + "/>\n";
    out += "  </class>\n";
  }

  if (w.viewpoint)
    out += "  <viewpoint" + attr("pos", vec(w.viewpoint->position)) +
           attr("orient", quat(w.viewpoint->orientation)) + "/>\n";
  if (w.frustum)
    out += "  <frustum" + attr("fovy", num(w.frustum->fov_y_deg)) +
           attr("aspect", num(w.frustum->aspect)) + attr("near", num(w.frustum->near_dist)) +
           attr("far", num(w.frustum->far_dist)) + "/>\n";
  for (const PathDecl& p : w.paths) {
    out += "  <path" + attr("halfwidth", num(p.half_width)) + ">\n";
    for (const math::Vec3& v : p.vertices) out += "    <v" + attr("pos", vec(v)) + "/>\n";
    out += "  </path>\n";
  }

  for (const InstanceDecl& d : w.instances) {
    switch (d.kind) {
      case InstanceKind::Object: {
        out += "  <object" + attr("name", d.name) + attr("type", d.type);
        if (d.pos) out += attr("pos", vec(*d.pos));
        if (d.orient) out += attr("orient", quat(*d.orient));
        if (d.halfextents) out += attr("halfextents", vec(*d.halfextents));
        if (!d.visible) out += attr("visible", "false");
        if (!d.selectable) out += attr("selectable", "false");
        if (d.bbox_visible) out += attr("bboxvisible", "true");
        out += "/>\n";
        break;
      }
      case InstanceKind::Videv: {
        out += "  <videv" + attr("name", d.name) + attr("type", d.type);
        if (d.mode) out += attr("mode", *d.mode);
        write_params(out, d.params, "    ", "videv");
        break;
      }
      case InstanceKind::IT:
      case InstanceKind::Filter: {
        const char* tag = d.kind == InstanceKind::IT ? "it" : "filter";
        out += "  <" + std::string(tag) + attr("name", d.name) + attr("type", d.type);
        if (d.enabled) out += attr("enabled", *d.enabled ? "true" : "false");
        write_params(out, d.params, "    ", tag);
        break;
      }
    }
  }

  for (const DataflowRel& r : w.rels)
    out += "  <dataflowRel" + attr("origin", r.origin) + attr("srcport", r.srcport) +
           attr("dest", r.dest) + attr("dstport", r.dstport) + "/>\n";

  out += "</world>\n";
  return out;
}

std::string format_diagnostic(const std::string& origin, const Diagnostic& d) {
  return origin + ":" + std::to_string(d.line) + ": " + d.code + ": " + d.message;
}

namespace {

std::size_t edit_distance(std::string_view a, std::string_view b) {
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t cost = a[i - 1] == b[j - 1] ? 0 : 1;
      const std::size_t next = std::min({row[j] + 1, row[j - 1] + 1, diag + cost});
      diag = row[j];
      row[j] = next;
    }
  }
  return row[b.size()];
}

std::string did_you_mean(const std::string& name, const std::vector<std::string>& candidates) {
  std::string best;
  std::size_t best_d = 3;  // suggestions only within distance 2
  for (const std::string& c : candidates) {
    const std::size_t big = std::max(c.size(), name.size());
    const std::size_t small = std::min(c.size(), name.size());
    if (big - small > 2) continue;
    const std::size_t d = edit_distance(name, c);
    if (d < best_d || (d == best_d && !best.empty() && c < best)) {
      best = c;
      best_d = d;
    }
  }
  return best.empty() ? "" : "; did you mean '" + best + "'?";
}

std::optional<PortKind> kind_from_name(std::string_view name) {
  if (name == "Locator") return PortKind::Locator;
  if (name == "Valuator") return PortKind::Valuator;
  if (name == "Button") return PortKind::Button;
  if (name == "Pick") return PortKind::Pick;
  return std::nullopt;
}

const flow::PortSpec* port_by_name(const std::vector<flow::PortSpec>& ports,
                                   const std::string& name) {
  for (const flow::PortSpec& p : ports)
    if (p.name == name) return &p;
  return nullptr;
}

std::vector<std::string> port_names(const std::vector<flow::PortSpec>& ports) {
  std::vector<std::string> out;
  for (const flow::PortSpec& p : ports) out.push_back(p.name);
  return out;
}

}  // namespace

std::vector<Diagnostic> validate(const WorldSpec& w, const FactoryRegistry& registry) {
  std::vector<Diagnostic> out;
  auto add = [&](int line, const char* code, std::string message) {
    out.push_back({line, code, std::move(message)});
  };

  // Class declarations.
  static const std::set<std::string> kBases{"Filter", "IT", "VIDev", "Object"};
  std::map<std::string, const ClassDecl*> classes;
  for (const ClassDecl& cls : w.classes) {
    if (!classes.emplace(cls.name, &cls).second)
      add(cls.line, "DuplicateName", "class '" + cls.name + "' is declared twice");
    std::set<std::string> ports;
    for (const PortDecl& p : cls.iports) {
      if (!kind_from_name(p.type))
        add(p.line, "BadValue", "port type '" + p.type + "' is not a sample kind");
      if (!ports.insert(p.name).second)
        add(p.line, "DuplicateName", "port '" + p.name + "' is declared twice in class '" + cls.name + "'");
    }
    for (const PortDecl& p : cls.oports) {
      if (!kind_from_name(p.type))
        add(p.line, "BadValue", "port type '" + p.type + "' is not a sample kind");
      if (!ports.insert(p.name).second)
        add(p.line, "DuplicateName", "port '" + p.name + "' is declared twice in class '" + cls.name + "'");
    }
    for (const PropDecl& p : cls.props) {
      if (!p.access.empty() && p.access != "r" && p.access != "w" && p.access != "rw")
        add(p.line, "BadValue", "prop access must be r, w or rw, got '" + p.access + "'");
    }
  }
  std::vector<std::string> class_names;
  for (const auto& [name, cls] : classes) class_names.push_back(name);
  class_names.insert(class_names.end(), kBases.begin(), kBases.end());
  for (const ClassDecl& cls : w.classes) {
    if (!cls.inherits.empty() && !classes.count(cls.inherits) && !kBases.count(cls.inherits))
      add(cls.line, "UnresolvedName",
          "class '" + cls.name + "' inherits unknown '" + cls.inherits + "'" +
              did_you_mean(cls.inherits, class_names));
  }
  for (const ClassDecl& cls : w.classes) {
    std::set<std::string> seen{cls.name};
    const ClassDecl* cur = &cls;
    while (!cur->inherits.empty()) {
      auto it = classes.find(cur->inherits);
      if (it == classes.end()) break;
      if (!seen.insert(it->first).second) {
        add(cls.line, "InheritanceCycle", "class '" + cls.name + "' participates in an inheritance cycle");
        break;
      }
      cur = it->second;
    }
  }

  // Instances.
  std::vector<std::string> type_names;
  for (const auto& [name, info] : registry.types()) type_names.push_back(name);
  std::map<std::string, const InstanceDecl*> objects;
  std::map<std::string, const InstanceDecl*> nodes;
  for (const InstanceDecl& d : w.instances) {
    if (d.kind == InstanceKind::Object) {
      objects[d.name] = &d;
      if (d.type == "Viewpoint") {
        if (d.name != scene::SceneState::kViewpointId)
          add(d.line, "BadViewpoint", "a Viewpoint object must be named 'viewpoint'");
      } else if (d.type != "Cube") {
        add(d.line, "UnknownType",
            "object type '" + d.type + "' is not supported" +
                did_you_mean(d.type, {"Cube", "Viewpoint"}));
      } else if (d.name == scene::SceneState::kViewpointId) {
        add(d.line, "BadViewpoint", "'viewpoint' is reserved for the viewpoint");
      }
      continue;
    }
    nodes[d.name] = &d;
    const FactoryInfo* info = registry.find(d.type);
    if (!info) {
      add(d.line, "UnknownType",
          "no type named '" + d.type + "'" + did_you_mean(d.type, type_names));
      continue;
    }
    for (const ParamDecl& p : d.params) {
      if (std::find(info->params.begin(), info->params.end(), p.name) == info->params.end())
        add(p.line, "UnknownParam",
            "type '" + d.type + "' has no parameter '" + p.name + "'" +
                did_you_mean(p.name, info->params));
    }
    if (d.kind == InstanceKind::Videv) {
      if (!info->inputs.empty())
        add(d.line, "VidevWithInputs",
            "type '" + d.type + "' has input ports and cannot be a virtual input device");
      if (info->outputs.size() != 1)
        add(d.line, "BadValue", "a virtual input device needs exactly one output port");
      if (d.mode && *d.mode != "queueAll" && *d.mode != "keepLast")
        add(d.line, "BadValue", "mode must be 'queueAll' or 'keepLast', got '" + *d.mode + "'");
    }
  }

  std::vector<std::string> instance_names;
  for (const auto& [name, d] : objects) instance_names.push_back(name);
  for (const auto& [name, d] : nodes) instance_names.push_back(name);
  instance_names.push_back(scene::SceneState::kViewpointId);
  std::sort(instance_names.begin(), instance_names.end());
  instance_names.erase(std::unique(instance_names.begin(), instance_names.end()),
                       instance_names.end());

  // Wiring. Edges accumulate only when both ends resolve, so the cycle check
  // mirrors what instantiate would build.
  std::vector<std::pair<std::string, std::string>> edges;
  auto reaches = [&edges](const std::string& from, const std::string& to) {
    std::set<std::string> seen{from};
    std::vector<std::string> frontier{from};
    while (!frontier.empty()) {
      const std::string cur = frontier.back();
      frontier.pop_back();
      if (cur == to) return true;
      for (const auto& [src, dst] : edges)
        if (src == cur && seen.insert(dst).second) frontier.push_back(dst);
    }
    return false;
  };

  for (const DataflowRel& r : w.rels) {
    PortKind src_kind = PortKind::Locator;
    bool src_ok = false;

    auto node_it = nodes.find(r.origin);
    const bool origin_is_object =
        objects.count(r.origin) != 0 || r.origin == scene::SceneState::kViewpointId;
    if (node_it != nodes.end()) {
      const FactoryInfo* info = registry.find(node_it->second->type);
      if (info) {
        const flow::PortSpec* p = port_by_name(info->outputs, r.srcport);
        if (!p) {
          add(r.line, "UnknownPort",
              "'" + r.origin + "' has no output port '" + r.srcport + "'" +
                  did_you_mean(r.srcport, port_names(info->outputs)));
        } else {
          src_kind = p->kind;
          src_ok = true;
        }
      }
    } else if (origin_is_object) {
      if (r.srcport == "locator") {
        src_kind = PortKind::Locator;
        src_ok = true;
      } else if (r.srcport == "pick") {
        src_kind = PortKind::Pick;
        src_ok = true;
      } else {
        add(r.line, "UnknownPort",
            "object origin '" + r.origin + "' supports srcport 'locator' or 'pick', not '" +
                r.srcport + "'");
      }
    } else {
      add(r.line, "UnresolvedName",
          "origin '" + r.origin + "' is not declared" + did_you_mean(r.origin, instance_names));
    }

    auto dest_it = nodes.find(r.dest);
    if (dest_it == nodes.end()) {
      if (objects.count(r.dest))
        add(r.line, "ObjectAsDest", "destination '" + r.dest + "' is an object, not a filter");
      else
        add(r.line, "UnresolvedName",
            "destination '" + r.dest + "' is not declared" + did_you_mean(r.dest, instance_names));
      continue;
    }
    const FactoryInfo* dinfo = registry.find(dest_it->second->type);
    if (!dinfo) continue;
    const flow::PortSpec* dp = port_by_name(dinfo->inputs, r.dstport);
    if (!dp) {
      add(r.line, "UnknownPort",
          "'" + r.dest + "' has no input port '" + r.dstport + "'" +
              did_you_mean(r.dstport, port_names(dinfo->inputs)));
      continue;
    }
    if (src_ok && dp->kind != src_kind) {
      add(r.line, "TypeMismatch",
          r.origin + "." + r.srcport + " (" + to_string(src_kind) + ") cannot feed " + r.dest +
              "." + r.dstport + " (" + std::string(to_string(dp->kind)) + ")");
      continue;
    }
    if (src_ok && node_it != nodes.end()) {
      if (r.origin == r.dest || reaches(r.dest, r.origin))
        add(r.line, "CycleCreated",
            "edge " + r.origin + " -> " + r.dest + " would close a cycle");
      else
        edges.emplace_back(r.origin, r.dest);
    }
  }

  if (w.frustum) {
    if (w.frustum->near_dist <= 0.0 || w.frustum->far_dist <= w.frustum->near_dist)
      add(0, "BadValue", "frustum requires 0 < near < far");
    if (w.frustum->fov_y_deg <= 0.0 || w.frustum->fov_y_deg >= 180.0 || w.frustum->aspect <= 0.0)
      add(0, "BadValue", "frustum requires 0 < fovy < 180 and aspect > 0");
  }
  for (const PathDecl& p : w.paths) {
    if (p.half_width <= 0.0) add(p.line, "BadValue", "path halfwidth must be positive");
    if (p.vertices.size() < 2) add(p.line, "BadValue", "a path needs at least two vertices");
  }

  return out;
}

std::optional<FactoryInfo> FactoryRegistry::register_factory(const std::string& name,
                                                             FactoryInfo info) {
  auto it = types_.find(name);
  std::optional<FactoryInfo> prior;
  if (it != types_.end()) {
    prior = std::move(it->second);
    it->second = std::move(info);
  } else {
    types_.emplace(name, std::move(info));
  }
  return prior;
}

const FactoryInfo* FactoryRegistry::find(const std::string& name) const {
  auto it = types_.find(name);
  return it == types_.end() ? nullptr : &it->second;
}

FactoryRegistry FactoryRegistry::with_builtins() {
  using filters::MoveByLocator;
  FactoryRegistry reg;

  auto device = [](PortKind kind, const char* oport) {
    FactoryInfo f;
    f.outputs = {{oport, kind}};
    f.make = [kind, port = std::string(oport)](const BuildContext&) {
      return filters::device_source_spec(port, kind);
    };
    return f;
  };
  reg.register_factory("LocatorDevice", device(PortKind::Locator, "locator"));
  reg.register_factory("MRLocator", device(PortKind::Locator, "locator"));
  reg.register_factory("MouseDevice", device(PortKind::Locator, "locator"));
  reg.register_factory("ButtonDevice", device(PortKind::Button, "button"));
  reg.register_factory("ValuatorDevice", device(PortKind::Valuator, "value"));
  reg.register_factory("PickDevice", device(PortKind::Pick, "pick"));

  {
    FactoryInfo f;
    f.inputs = {{"obj", PortKind::Pick}, {"pos", PortKind::Locator}};
    f.params = {"object", "mode"};
    f.make = [](const BuildContext&) {
      return filters::move_by_locator_spec("", MoveByLocator::Mode::Absolute);
    };
    reg.register_factory("MoveByLocator", f);
  }
  {
    FactoryInfo f;
    f.inputs = {{"iportLocator", PortKind::Locator}};
    f.make = [](const BuildContext&) { return filters::location_to_viewpoint_spec(); };
    reg.register_factory("Location2Viewpoint", f);
  }
  {
    FactoryInfo f;
    f.inputs = {{"hand", PortKind::Locator}, {"head", PortKind::Locator}};
    f.outputs = {{"locator", PortKind::Locator}};
    f.params = {"D", "k", "center"};
    f.make = [](const BuildContext&) { return filters::gogo_filter_spec(0.5, 1.0 / 6.0, {}); };
    reg.register_factory("GoGoFilter", f);
  }
  {
    FactoryInfo f;
    f.inputs = {{"real", PortKind::Locator}, {"virtual", PortKind::Locator}};
    f.params = {"cube", "mover", "epsilon"};
    f.make = [](const BuildContext&) { return filters::gogo_control_spec("", "", 1e-6); };
    reg.register_factory("GoGoControl", f);
  }
  {
    FactoryInfo f;
    f.inputs = {{"pos", PortKind::Locator}};
    f.outputs = {{"pick", PortKind::Pick}};
    f.params = {"candidates"};
    f.make = [](const BuildContext&) { return filters::select_by_pointing_spec(); };
    reg.register_factory("Select1ByPointing", f);
  }
  {
    FactoryInfo f;
    f.inputs = {{"pos", PortKind::Locator}};
    f.outputs = {{"pick", PortKind::Pick}};
    f.params = {"hand", "candidates"};
    f.make = [](const BuildContext&) { return filters::select_by_touching_spec(""); };
    reg.register_factory("Select1ByTouching", f);
  }
  {
    FactoryInfo f;
    f.inputs = {{"obj", PortKind::Pick}};
    f.make = [](const BuildContext&) { return filters::change_object_spec(); };
    reg.register_factory("ChangeObject", f);
  }
  {
    FactoryInfo f;
    f.inputs = {{"grab", PortKind::Button},
                {"release", PortKind::Button},
                {"pick", PortKind::Pick}};
    f.outputs = {{"obj", PortKind::Pick}};
    f.params = {"selection", "mover"};
    f.make = [](const BuildContext&) { return filters::move_control_spec("", ""); };
    reg.register_factory("MoveControl", f);
  }
  {
    FactoryInfo f;
    f.inputs = {{"mouse", PortKind::Locator},
                {"start", PortKind::Button},
                {"stop", PortKind::Button},
                {"dt", PortKind::Valuator}};
    f.outputs = {{"locator", PortKind::Locator}};
    f.params = {"width", "height", "omega", "smax", "origin", "yaw0"};
    f.make = [](const BuildContext&) { return filters::motorcycle_spec(); };
    reg.register_factory("Motorcycle", f);
  }
  {
    FactoryInfo f;
    f.inputs = {{"candidate", PortKind::Locator}};
    f.outputs = {{"locator", PortKind::Locator}};
    f.params = {"start"};
    f.make = [](const BuildContext& ctx) {
      std::vector<filters::Path> paths;
      if (ctx.world)
        for (const PathDecl& p : ctx.world->paths) paths.push_back({p.half_width, p.vertices});
      return filters::inside_path_spec(std::move(paths));
    };
    reg.register_factory("InsidePath", f);
  }
  {
    FactoryInfo f;
    f.inputs = {{"up", PortKind::Button}, {"down", PortKind::Button}, {"dt", PortKind::Valuator}};
    f.outputs = {{"y", PortKind::Valuator}};
    f.params = {"vy", "y0"};
    f.make = [](const BuildContext&) { return filters::move_up_dn_spec(); };
    reg.register_factory("MoveUpDn", f);
  }
  {
    FactoryInfo f;
    f.inputs = {{"ground", PortKind::Locator}, {"y", PortKind::Valuator}};
    f.outputs = {{"locator", PortKind::Locator}};
    f.make = [](const BuildContext&) { return filters::combine_xzy_spec(); };
    reg.register_factory("CombineXZY", f);
  }
  {
    FactoryInfo f;
    f.inputs = {{"button", PortKind::Button}};
    f.params = {"id"};
    f.make = [](const BuildContext&) { return filters::quit_by_button_spec(); };
    reg.register_factory("QuitByButton", f);
    reg.register_factory("QuitByNavigate", f);
  }
  {
    FactoryInfo f;
    f.outputs = {{"value", PortKind::Valuator}};
    f.make = [](const BuildContext&) { return filters::timer_spec(); };
    reg.register_factory("Timer", f);
  }
  {
    FactoryInfo f;
    f.inputs = {{"buttons", PortKind::Button}};
    f.outputs = {{"locator", PortKind::Locator}};
    f.params = {"lin", "ang"};
    f.make = [](const BuildContext&) { return filters::buttons_to_locator_spec(); };
    reg.register_factory("Buttons2Locator", f);
  }
  {
    FactoryInfo f;
    f.inputs = {{"handIport", PortKind::Locator}, {"headIport", PortKind::Locator}};
    f.outputs = {{"gogoPosOPort", PortKind::Locator}, {"pickOPort", PortKind::Pick}};
    f.params = {"hand", "cube", "D", "k", "center", "epsilon", "candidates"};
    f.make = [](const BuildContext&) { return filters::gogo_it_spec(); };
    reg.register_factory("GoGoIT", f);
  }
  {
    FactoryInfo f;
    f.inputs = {{"hand", PortKind::Locator}};
    f.outputs = {{"pick", PortKind::Pick}};
    f.params = {"hand", "line", "candidates"};
    f.make = [](const BuildContext&) { return filters::raycast_it_spec(); };
    reg.register_factory("RayCastingIT", f);
    reg.register_factory("RayCastIT", f);
  }

  return reg;
}

World instantiate(const WorldSpec& w, const FactoryRegistry& registry) {
  World world;
  if (w.frustum) world.scene.set_frustum(*w.frustum);
  if (w.viewpoint) world.scene.set_viewpoint(*w.viewpoint);

  const BuildContext ctx{&w};
  for (const InstanceDecl& inst : w.instances) {
    if (inst.kind == InstanceKind::Object) {
      if (inst.type == "Viewpoint") {
        scene::Transform t;
        if (inst.pos) t.position = *inst.pos;
        if (inst.orient) t.orientation = *inst.orient;
        world.scene.set_viewpoint(t);
        continue;
      }
      if (inst.type != "Cube")
        fail(Err::UnknownType, "object '" + inst.name + "' has unknown type '" + inst.type + "'");
      scene::SceneObject obj;
      obj.id = inst.name;
      if (inst.pos) obj.transform.position = *inst.pos;
      if (inst.orient) obj.transform.orientation = *inst.orient;
      if (inst.halfextents) obj.half_extents = *inst.halfextents;
      obj.visible = inst.visible;
      obj.selectable = inst.selectable;
      obj.bbox_visible = inst.bbox_visible;
      world.scene.add_object(std::move(obj));
      continue;
    }

    const FactoryInfo* info = registry.find(inst.type);
    if (!info) fail(Err::UnknownType, "no factory registered for type '" + inst.type + "'");
    flow::FilterNode& node = world.flow.register_node(inst.name, info->make(ctx));
    try {
      if (node.behavior) {
        for (const ParamDecl& p : inst.params) node.behavior->set_param(p.name, p.value);
        node.behavior->finalize();
      } else if (!inst.params.empty()) {
        fail(Err::UnsupportedParam, "type '" + inst.type + "' takes no parameters");
      }
    } catch (const Error& e) {
      fail(Err::FactoryFailure, "instance '" + inst.name + "': " + e.what());
    }
    if (inst.enabled && !*inst.enabled) world.flow.set_enabled(inst.name, false);
    if (inst.kind == InstanceKind::Videv) world.flow.bind_device(inst.name, inst.name);
  }

  for (const DataflowRel& rel : w.rels) {
    const bool viewpoint_origin = rel.origin == scene::SceneState::kViewpointId;
    if (viewpoint_origin || world.scene.object(rel.origin)) {
      PortKind kind;
      if (rel.srcport == "locator")
        kind = PortKind::Locator;
      else if (rel.srcport == "pick")
        kind = PortKind::Pick;
      else
        fail(Err::UnknownPort, "object origin '" + rel.origin +
                                   "' supports srcport 'locator' or 'pick', not '" + rel.srcport +
                                   "'");
      const flow::FilterNode& dest = world.flow.at(rel.dest);
      const flow::InputPort* ip = dest.input(rel.dstport);
      if (!ip)
        fail(Err::UnknownPort, "node '" + rel.dest + "' has no input port '" + rel.dstport + "'");
      if (ip->kind != kind)
        fail(Err::TypeMismatch, "listener port " + rel.dest + "." + rel.dstport + " is " +
                                    std::string(to_string(ip->kind)) + ", not " +
                                    std::string(to_string(kind)));
      world.scene.add_listener(rel.origin, rel.dest, rel.dstport, kind);
    } else {
      world.flow.connect(rel.origin, rel.srcport, rel.dest, rel.dstport);
    }
  }
  return world;
}

}  // namespace itflow::dsl
