// Headless scene graph: oriented-box objects keyed by id, a viewpoint pose,
// and a view frustum. Filters never mutate the scene directly; they queue
// DeferredWrites that the execution model applies at the end of a step.
// Listeners registered on an object receive a notification sample at the
// start of the step after a change is applied.
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "math.hpp"
#include "sample.hpp"

namespace itflow::scene {

struct Transform {
  math::Vec3 position;
  math::Quat orientation;
};

inline bool operator==(const Transform& a, const Transform& b) {
  return a.position == b.position && a.orientation == b.orientation;
}

struct SceneObject {
  std::string id;
  Transform transform;
  math::Vec3 half_extents{0.5, 0.5, 0.5};
  bool visible = true;
  bool bbox_visible = false;
  bool selectable = true;
};

struct Aabb {
  math::Vec3 min;
  math::Vec3 max;
};

// Symmetric perspective frustum attached to the viewpoint.
struct Frustum {
  double fov_y_deg = 60.0;
  double aspect = 4.0 / 3.0;
  double near_dist = 0.1;
  double far_dist = 1000.0;
};

enum class ObjectFlag { Visible, BboxVisible, Selectable };

inline const char* to_string(ObjectFlag flag) {
  switch (flag) {
    case ObjectFlag::Visible: return "visible";
    case ObjectFlag::BboxVisible: return "bboxVisible";
    case ObjectFlag::Selectable: return "selectable";
  }
  return "unknown";
}

// A scene mutation recorded during a step and applied when the step ends.
// `sequence` orders writes within one step; the last write wins.
struct DeferredWrite {
  enum class Kind { Transform, Flag };
  std::string object;
  Kind kind = Kind::Transform;
  Transform transform;
  ObjectFlag flag = ObjectFlag::Visible;
  bool value = false;
  std::string origin;
  int sequence = 0;
};

struct SceneListener {
  std::string node;
  std::string iport;
  PortKind kind = PortKind::Locator;
};

struct Notification {
  std::string node;
  std::string iport;
  Sample sample;
};

struct RayHit {
  std::string object;
  double t = 0.0;
};

class SceneState {
 public:
  // The viewpoint is addressable like an object for transform writes.
  static constexpr const char* kViewpointId = "viewpoint";

  void add_object(SceneObject obj);
  const SceneObject* object(const std::string& id) const;
  const std::map<std::string, SceneObject>& objects() const { return objects_; }

  const Transform& viewpoint() const { return viewpoint_; }
  void set_viewpoint(const Transform& t) { viewpoint_ = t; }
  const Frustum& frustum() const { return frustum_; }
  void set_frustum(const Frustum& f) { frustum_ = f; }

  // Destination ports must be Locator (receives the new transform) or Pick
  // (receives the changed object's id).
  void add_listener(const std::string& object, const std::string& node, const std::string& iport,
                    PortKind kind);

  // Applies one write. Returns false when the write is a no-op (new value
  // equal to the current one); only real changes queue notifications.
  bool apply_mutation(const DeferredWrite& write);

  // Drains notifications queued by apply_mutation since the last call.
  std::vector<Notification> take_notifications();

 private:
  void notify(const std::string& id, const Transform& t);

  std::map<std::string, SceneObject> objects_;
  Transform viewpoint_{};
  Frustum frustum_{};
  std::map<std::string, std::vector<SceneListener>> listeners_;
  std::vector<Notification> pending_;
};

// Tight world-space AABB of an oriented box.
Aabb world_aabb(const SceneObject& obj);

// Closed-interval test: touching faces count as overlap.
bool overlap(const Aabb& a, const Aabb& b);

// Nearest hit along origin + t*dir with t >= 0 over the candidate ids
// (missing ids are skipped). A ray starting inside a box hits it at t = 0.
// Ties within 1e-12 resolve to the lexicographically smaller id.
std::optional<RayHit> ray_nearest(const SceneState& scene, const math::Vec3& origin,
                                  const math::Vec3& dir, const std::vector<std::string>& candidates);

// Ids of visible objects whose AABB intersects the view frustum, in id order.
// The test is conservative: everything intersecting is included.
std::vector<std::string> frustum_objects(const SceneState& scene);

}  // namespace itflow::scene
