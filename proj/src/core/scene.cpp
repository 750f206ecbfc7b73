#include "scene.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace itflow::scene {

using math::Vec3;

void SceneState::add_object(SceneObject obj) {
  if (obj.id == kViewpointId)
    fail(Err::DuplicateName, "'" + obj.id + "' is reserved for the viewpoint");
  auto [it, inserted] = objects_.emplace(obj.id, std::move(obj));
  if (!inserted) fail(Err::DuplicateName, "object '" + it->first + "' already exists");
}

const SceneObject* SceneState::object(const std::string& id) const {
  auto it = objects_.find(id);
  return it == objects_.end() ? nullptr : &it->second;
}

void SceneState::add_listener(const std::string& object, const std::string& node,
                              const std::string& iport, PortKind kind) {
  if (object != kViewpointId && objects_.find(object) == objects_.end())
    fail(Err::UnknownObject, "cannot listen on unknown object '" + object + "'");
  if (kind != PortKind::Locator && kind != PortKind::Pick)
    fail(Err::TypeMismatch, "scene listeners require a Locator or Pick port, got " +
                                std::string(to_string(kind)) + " on " + node + "." + iport);
  listeners_[object].push_back({node, iport, kind});
}

void SceneState::notify(const std::string& id, const Transform& t) {
  auto it = listeners_.find(id);
  if (it == listeners_.end()) return;
  for (const SceneListener& l : it->second) {
    if (l.kind == PortKind::Locator)
      pending_.push_back({l.node, l.iport, Locator{t.position, t.orientation}});
    else
      pending_.push_back({l.node, l.iport, Pick{id}});
  }
}

bool SceneState::apply_mutation(const DeferredWrite& write) {
  if (write.object == kViewpointId) {
    if (write.kind != DeferredWrite::Kind::Transform) return false;
    if (viewpoint_ == write.transform) return false;
    viewpoint_ = write.transform;
    notify(kViewpointId, viewpoint_);
    return true;
  }
  auto it = objects_.find(write.object);
  if (it == objects_.end())
    fail(Err::UnknownObject, "deferred write targets unknown object '" + write.object + "'");
  SceneObject& obj = it->second;
  bool changed = false;
  if (write.kind == DeferredWrite::Kind::Transform) {
    changed = !(obj.transform == write.transform);
    if (changed) obj.transform = write.transform;
  } else {
    bool* slot = nullptr;
    switch (write.flag) {
      case ObjectFlag::Visible: slot = &obj.visible; break;
      case ObjectFlag::BboxVisible: slot = &obj.bbox_visible; break;
      case ObjectFlag::Selectable: slot = &obj.selectable; break;
    }
    changed = (*slot != write.value);
    if (changed) *slot = write.value;
  }
  if (changed) notify(obj.id, obj.transform);
  return changed;
}

std::vector<Notification> SceneState::take_notifications() {
  std::vector<Notification> out;
  out.swap(pending_);
  return out;
}

Aabb world_aabb(const SceneObject& obj) {
  Vec3 cx, cy, cz;
  math::rotation_columns(obj.transform.orientation, cx, cy, cz);
  const Vec3& h = obj.half_extents;
  const Vec3 ext{std::abs(cx.x) * h.x + std::abs(cy.x) * h.y + std::abs(cz.x) * h.z,
                 std::abs(cx.y) * h.x + std::abs(cy.y) * h.y + std::abs(cz.y) * h.z,
                 std::abs(cx.z) * h.x + std::abs(cy.z) * h.y + std::abs(cz.z) * h.z};
  return {obj.transform.position - ext, obj.transform.position + ext};
}

bool overlap(const Aabb& a, const Aabb& b) {
  return a.min.x <= b.max.x && b.min.x <= a.max.x && a.min.y <= b.max.y && b.min.y <= a.max.y &&
         a.min.z <= b.max.z && b.min.z <= a.max.z;
}

namespace {

// Slab intersection; returns entry distance (0 when the origin is inside).
bool ray_box(const Vec3& o, const Vec3& d, const Aabb& box, double& t_out) {
  double tlo = -std::numeric_limits<double>::infinity();
  double thi = std::numeric_limits<double>::infinity();
  const double os[3] = {o.x, o.y, o.z};
  const double ds[3] = {d.x, d.y, d.z};
  const double lo[3] = {box.min.x, box.min.y, box.min.z};
  const double hi[3] = {box.max.x, box.max.y, box.max.z};
  for (int a = 0; a < 3; ++a) {
    if (ds[a] == 0.0) {
      if (os[a] < lo[a] || os[a] > hi[a]) return false;
      continue;
    }
    double t1 = (lo[a] - os[a]) / ds[a];
    double t2 = (hi[a] - os[a]) / ds[a];
    if (t1 > t2) std::swap(t1, t2);
    tlo = std::max(tlo, t1);
    thi = std::min(thi, t2);
    if (tlo > thi) return false;
  }
  if (thi < 0.0) return false;
  t_out = tlo < 0.0 ? 0.0 : tlo;
  return true;
}

constexpr double kTieEps = 1e-12;

}  // namespace

std::optional<RayHit> ray_nearest(const SceneState& scene, const Vec3& origin, const Vec3& dir,
                                  const std::vector<std::string>& candidates) {
  std::optional<RayHit> best;
  for (const std::string& id : candidates) {
    const SceneObject* obj = scene.object(id);
    if (!obj) continue;
    double t = 0.0;
    if (!ray_box(origin, dir, world_aabb(*obj), t)) continue;
    if (!best || t < best->t - kTieEps || (std::abs(t - best->t) <= kTieEps && id < best->object))
      best = RayHit{id, t};
  }
  return best;
}

namespace {

struct Plane {
  Vec3 normal;  // points into the frustum
  double d = 0.0;
};

// Conservative plane test: reject only when the box is fully outside.
bool outside(const Plane& p, const Aabb& box) {
  const Vec3 v{p.normal.x >= 0.0 ? box.max.x : box.min.x, p.normal.y >= 0.0 ? box.max.y : box.min.y,
               p.normal.z >= 0.0 ? box.max.z : box.min.z};
  return math::dot(p.normal, v) < p.d;
}

}  // namespace

std::vector<std::string> frustum_objects(const SceneState& scene) {
  const Transform& vp = scene.viewpoint();
  const Frustum& fr = scene.frustum();
  const double th = std::tan(0.5 * math::deg_to_rad(fr.fov_y_deg));
  const double tw = th * fr.aspect;

  // Inward normals in camera space (camera looks down -Z, +Y up).
  const Vec3 locals[6] = {{0.0, 0.0, -1.0}, {0.0, 0.0, 1.0},  {0.0, -1.0, -th},
                          {0.0, 1.0, -th},  {-1.0, 0.0, -tw}, {1.0, 0.0, -tw}};
  const Vec3 points[6] = {{0.0, 0.0, -fr.near_dist}, {0.0, 0.0, -fr.far_dist}, {}, {}, {}, {}};

  Plane planes[6];
  for (int i = 0; i < 6; ++i) {
    Vec3 n = math::rotate(vp.orientation, locals[i]);
    const double len = math::length(n);
    n = n * (1.0 / len);
    const Vec3 point = vp.position + math::rotate(vp.orientation, points[i]);
    planes[i] = {n, math::dot(n, point)};
  }

  std::vector<std::string> out;
  for (const auto& [id, obj] : scene.objects()) {
    if (!obj.visible) continue;
    const Aabb box = world_aabb(obj);
    bool in = true;
    for (const Plane& p : planes) {
      if (outside(p, box)) {
        in = false;
        break;
      }
    }
    if (in) out.push_back(id);
  }
  return out;
}

}  // namespace itflow::scene
