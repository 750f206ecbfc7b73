// World description format: classes document filter interfaces, instances
// declare scene objects, devices and filters, and dataflowRel elements wire
// ports (or register scene listeners when the origin is an object). Parsing
// is strict; validation returns diagnostics instead of throwing.
#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "flow.hpp"
#include "math.hpp"
#include "scene.hpp"

namespace itflow::dsl {

struct PropDecl {
  std::string name;
  std::string type;
  std::string access;  // r, w, rw or empty
  int line = 0;
};

struct PortDecl {
  std::string name;
  std::string type;  // sample kind name
  int line = 0;
};

struct ClassDecl {
  std::string name;
  std::string inherits;
  std::vector<PropDecl> props;
  std::vector<PortDecl> iports;
  std::vector<PortDecl> oports;
  int line = 0;
};

struct ParamDecl {
  std::string name;
  std::string value;
  int line = 0;
};

enum class InstanceKind { Object, Videv, IT, Filter };

struct InstanceDecl {
  InstanceKind kind = InstanceKind::Filter;
  std::string name;
  std::string type;
  std::vector<ParamDecl> params;
  // object attributes
  std::optional<math::Vec3> pos;
  std::optional<math::Quat> orient;
  std::optional<math::Vec3> halfextents;
  bool visible = true;
  bool selectable = true;
  bool bbox_visible = false;
  // filter/it attribute
  std::optional<bool> enabled;
  // videv attribute
  std::optional<std::string> mode;
  int line = 0;
};

struct DataflowRel {
  std::string origin;
  std::string srcport;
  std::string dest;
  std::string dstport;
  int line = 0;
};

struct PathDecl {
  double half_width = 1.0;
  std::vector<math::Vec3> vertices;
  int line = 0;
};

struct WorldSpec {
  std::string name;
  std::vector<ClassDecl> classes;
  std::vector<InstanceDecl> instances;
  std::vector<DataflowRel> rels;
  std::optional<scene::Transform> viewpoint;
  std::optional<scene::Frustum> frustum;
  std::vector<PathDecl> paths;
};

WorldSpec parse_world(std::string_view text);
std::string serialize_world(const WorldSpec& world);

struct Diagnostic {
  int line = 0;
  std::string code;
  std::string message;
};

std::string format_diagnostic(const std::string& origin, const Diagnostic& d);

struct BuildContext {
  const WorldSpec* world = nullptr;
};

using ParamList = std::vector<std::string>;

struct FactoryInfo {
  std::vector<flow::PortSpec> inputs;
  std::vector<flow::PortSpec> outputs;
  ParamList params;
  std::function<flow::NodeSpec(const BuildContext&)> make;
};

class FactoryRegistry {
 public:
  // Returns the factory previously registered under this name, if any.
  std::optional<FactoryInfo> register_factory(const std::string& name, FactoryInfo info);
  const FactoryInfo* find(const std::string& name) const;
  const std::map<std::string, FactoryInfo>& types() const { return types_; }

  // All built-in devices, filters and composites.
  static FactoryRegistry with_builtins();

 private:
  std::map<std::string, FactoryInfo> types_;
};

std::vector<Diagnostic> validate(const WorldSpec& world, const FactoryRegistry& registry);

struct World {
  flow::Dataflow flow;
  scene::SceneState scene;
};

// Builds the runtime graph and scene. Call validate first; construction
// throws on anything a diagnostic would have flagged.
World instantiate(const WorldSpec& world, const FactoryRegistry& registry);

}  // namespace itflow::dsl
