#include "filters.hpp"

#include <algorithm>
#include <cmath>

#include "parse.hpp"

namespace itflow::filters {

using math::Vec3;
using scene::SceneObject;

double gogo_extent(double r, double D, double k) {
  if (r < D) return r;
  const double e = r - D;
  return r + k * e * e;
}

Vec3 gogo_map(const Vec3& hand, const Vec3& origin, double D, double k) {
  const Vec3 v = hand - origin;
  const double r = math::length(v);
  // Identity region passes the hand through untouched (same bits, not a
  // scaled copy), which also covers the degenerate r == 0 case.
  if (r < D || r == 0.0) return hand;
  return origin + v * (gogo_extent(r, D, k) / r);
}

namespace {

// Selection considers selectable, visible objects only.
std::vector<std::string> selectable_candidates(const scene::SceneState& scene,
                                               const std::vector<std::string>& explicit_ids,
                                               const std::string& exclude) {
  std::vector<std::string> out;
  if (explicit_ids.empty()) {
    for (const auto& [id, obj] : scene.objects())
      if (obj.selectable && obj.visible && id != exclude) out.push_back(id);
  } else {
    for (const std::string& id : explicit_ids) {
      const SceneObject* obj = scene.object(id);
      if (obj && obj->selectable && obj->visible && id != exclude) out.push_back(id);
    }
  }
  return out;
}

const Locator& as_locator(const Sample& s) { return std::get<Locator>(s); }
const Button& as_button(const Sample& s) { return std::get<Button>(s); }

}  // namespace

MoveByLocator::MoveByLocator(std::string object, Mode mode, std::string pos_port, bool has_obj_port)
    : target_(std::move(object)), mode_(mode), pos_port_(std::move(pos_port)),
      has_obj_port_(has_obj_port) {}

void MoveByLocator::process(flow::StepContext& ctx) {
  if (has_obj_port_) {
    for (const Sample& s : ctx.inputs("obj")) {
      target_ = std::get<Pick>(s).target.value_or("");
      reference_.reset();
    }
  }
  std::span<const Sample> positions = ctx.inputs(pos_port_);
  if (positions.empty() || target_.empty()) return;

  scene::Transform base;
  if (target_ == scene::SceneState::kViewpointId) {
    base = ctx.scene().viewpoint();
  } else {
    const SceneObject* obj = ctx.scene().object(target_);
    if (!obj) return;
    base = obj->transform;
  }

  if (mode_ == Mode::Absolute) {
    for (const Sample& s : positions) {
      const Locator& loc = as_locator(s);
      ctx.write_transform(target_, {loc.position, loc.orientation});
    }
    return;
  }

  // Offset: compose the deltas between consecutive samples onto the pre-step
  // pose; the first sample after (re)anchoring only establishes the reference.
  scene::Transform cur = base;
  bool moved = false;
  for (const Sample& s : positions) {
    const Locator& loc = as_locator(s);
    if (reference_) {
      cur.position = cur.position + (loc.position - reference_->position);
      cur.orientation =
          ((loc.orientation * reference_->orientation.conjugate()) * cur.orientation).normalized();
      moved = true;
    }
    reference_ = loc;
  }
  if (moved) ctx.write_transform(target_, cur);
}

void MoveByLocator::set_param(std::string_view name, const std::string& value) {
  if (name == "object") {
    target_ = value;
    reference_.reset();
  } else if (name == "mode") {
    if (value == "absolute")
      mode_ = Mode::Absolute;
    else if (value == "offset")
      mode_ = Mode::Offset;
    else
      fail(Err::InvalidParam, "mode: expected 'absolute' or 'offset', got '" + value + "'");
    reference_.reset();
  } else {
    Behavior::set_param(name, value);
  }
}

void MoveByLocator::enabled_changed(bool enabled) {
  if (enabled) reference_.reset();
}

GoGoFilter::GoGoFilter(double D, double k, Vec3 center) : d_(D), k_(k), center_(center) {}

void GoGoFilter::process(flow::StepContext& ctx) {
  for (const Sample& s : ctx.inputs("head")) head_ = as_locator(s).position;
  const Vec3 origin = head_.value_or(center_);
  for (const Sample& s : ctx.inputs("hand")) {
    const Locator& loc = as_locator(s);
    ctx.emit("locator", Locator{gogo_map(loc.position, origin, d_, k_), loc.orientation});
  }
}

void GoGoFilter::set_param(std::string_view name, const std::string& value) {
  if (name == "D")
    d_ = parse_double(value, "D");
  else if (name == "k")
    k_ = parse_double(value, "k");
  else if (name == "center")
    center_ = parse_vec3(value, "center");
  else
    Behavior::set_param(name, value);
}

GoGoControl::GoGoControl(std::string cube, std::string mover, double epsilon)
    : cube_(std::move(cube)), mover_(std::move(mover)), epsilon_(epsilon) {}

void GoGoControl::process(flow::StepContext& ctx) {
  bool got_real = false;
  bool got_virtual = false;
  for (const Sample& s : ctx.inputs("real")) {
    real_ = as_locator(s).position;
    got_real = true;
  }
  for (const Sample& s : ctx.inputs("virtual")) {
    virtual_ = as_locator(s).position;
    got_virtual = true;
  }
  if (!got_real || !got_virtual) return;

  const bool diverged = math::distance(*real_, *virtual_) > epsilon_;
  if (diverged_ && *diverged_ == diverged) return;
  diverged_ = diverged;
  if (ctx.scene().object(cube_))
    ctx.write_flag(cube_, scene::ObjectFlag::Visible, diverged);
  ctx.send_control({mover_, diverged ? flow::ControlVerb::Enable : flow::ControlVerb::Disable, {}});
}

void GoGoControl::set_param(std::string_view name, const std::string& value) {
  if (name == "cube")
    cube_ = value;
  else if (name == "mover")
    mover_ = value;
  else if (name == "epsilon")
    epsilon_ = parse_double(value, "epsilon");
  else
    Behavior::set_param(name, value);
}

Select1ByPointing::Select1ByPointing(std::vector<std::string> candidates)
    : candidates_(std::move(candidates)) {}

void Select1ByPointing::process(flow::StepContext& ctx) {
  std::span<const Sample> ps = ctx.inputs("pos");
  if (ps.empty()) return;
  const Locator& loc = as_locator(ps.back());
  const auto cands = selectable_candidates(ctx.scene(), candidates_, "");
  const auto hit =
      scene::ray_nearest(ctx.scene(), loc.position, forward_axis(loc.orientation), cands);
  std::optional<std::string> next = hit ? std::optional(hit->object) : std::nullopt;
  if (next != picked_) {
    picked_ = next;
    ctx.emit("pick", Pick{std::move(next)});
  }
}

void Select1ByPointing::set_param(std::string_view name, const std::string& value) {
  if (name == "candidates")
    candidates_ = split_ws(value);
  else
    Behavior::set_param(name, value);
}

Select1ByTouching::Select1ByTouching(std::string hand, std::vector<std::string> candidates)
    : hand_(std::move(hand)), candidates_(std::move(candidates)) {}

void Select1ByTouching::process(flow::StepContext& ctx) {
  if (ctx.inputs("pos").empty()) return;
  const SceneObject* hand = ctx.scene().object(hand_);
  if (!hand) return;
  const scene::Aabb hand_box = scene::world_aabb(*hand);

  std::optional<std::string> next;
  double best = 0.0;
  for (const std::string& id : selectable_candidates(ctx.scene(), candidates_, hand_)) {
    const SceneObject* obj = ctx.scene().object(id);
    if (!scene::overlap(hand_box, scene::world_aabb(*obj))) continue;
    const double d = math::distance(hand->transform.position, obj->transform.position);
    if (!next || d < best || (d == best && id < *next)) {
      next = id;
      best = d;
    }
  }
  if (next != picked_) {
    picked_ = next;
    ctx.emit("pick", Pick{std::move(next)});
  }
}

void Select1ByTouching::set_param(std::string_view name, const std::string& value) {
  if (name == "hand")
    hand_ = value;
  else if (name == "candidates")
    candidates_ = split_ws(value);
  else
    Behavior::set_param(name, value);
}

void ChangeObject::process(flow::StepContext& ctx) {
  for (const Sample& s : ctx.inputs("obj")) {
    const Pick& pick = std::get<Pick>(s);
    if (pick.target == highlighted_) continue;
    if (highlighted_ && ctx.scene().object(*highlighted_))
      ctx.write_flag(*highlighted_, scene::ObjectFlag::BboxVisible, false);
    if (pick.target && ctx.scene().object(*pick.target))
      ctx.write_flag(*pick.target, scene::ObjectFlag::BboxVisible, true);
    highlighted_ = pick.target;
  }
}

MoveControl::MoveControl(std::string selection, std::string mover)
    : selection_(std::move(selection)), mover_(std::move(mover)) {}

void MoveControl::process(flow::StepContext& ctx) {
  if (!initialized_) {
    // Establish the baseline regardless of how the world declared the nodes.
    ctx.send_control({selection_, flow::ControlVerb::Enable, {}});
    ctx.send_control({mover_, flow::ControlVerb::Disable, {}});
    initialized_ = true;
  }
  for (const Sample& s : ctx.inputs("pick")) pick_ = std::get<Pick>(s).target;
  for (const Sample& s : ctx.inputs("grab")) {
    if (!as_button(s).pressed || phase_ != Phase::Selecting || !pick_) continue;
    phase_ = Phase::Moving;
    ctx.send_control({selection_, flow::ControlVerb::Disable, {}});
    ctx.send_control({mover_, flow::ControlVerb::Enable, {}});
    ctx.emit("obj", Pick{pick_});
  }
  for (const Sample& s : ctx.inputs("release")) {
    if (!as_button(s).pressed || phase_ != Phase::Moving) continue;
    phase_ = Phase::Selecting;
    ctx.send_control({mover_, flow::ControlVerb::Disable, {}});
    ctx.send_control({selection_, flow::ControlVerb::Enable, {}});
    ctx.emit("obj", Pick{std::nullopt});
  }
}

void MoveControl::set_param(std::string_view name, const std::string& value) {
  if (name == "selection")
    selection_ = value;
  else if (name == "mover")
    mover_ = value;
  else
    Behavior::set_param(name, value);
}

void set_selection_it(flow::Dataflow& flow, const std::string& control_node,
                      const std::string& it_node) {
  flow::FilterNode& ctrl = flow.at(control_node);
  auto* control = dynamic_cast<MoveControl*>(ctrl.behavior.get());
  if (!control) fail(Err::TypeMismatch, "node '" + control_node + "' is not a MoveControl");
  const flow::FilterNode& it = flow.at(it_node);
  const flow::OutputPort* pick_port = nullptr;
  for (const flow::OutputPort& op : it.outputs) {
    if (op.kind == PortKind::Pick) {
      pick_port = &op;
      break;
    }
  }
  if (!pick_port) fail(Err::NoPickPort, "node '" + it_node + "' exposes no Pick output");
  flow.disconnect_into(control_node, "pick");
  flow.connect(it_node, pick_port->name, control_node, "pick");
  control->set_selection(it_node);
  flow.set_enabled(it_node, control->phase() == MoveControl::Phase::Selecting);
}

Motorcycle::Motorcycle(double width, double height, double omega_deg, double smax, Vec3 origin,
                       double yaw0_deg)
    : width_(width), height_(height), omega_deg_(omega_deg), smax_(smax), position_(origin),
      yaw_(math::deg_to_rad(yaw0_deg)) {}

void Motorcycle::process(flow::StepContext& ctx) {
  for (const Sample& s : ctx.inputs("mouse")) {
    const Locator& loc = as_locator(s);
    steer_ = std::clamp(2.0 * loc.position.x / width_ - 1.0, -1.0, 1.0);
    throttle_ = std::clamp(2.0 * loc.position.y / height_ - 1.0, -1.0, 1.0);
  }
  for (const Sample& s : ctx.inputs("start"))
    if (as_button(s).pressed) engaged_ = true;
  for (const Sample& s : ctx.inputs("stop"))
    if (as_button(s).pressed) engaged_ = false;

  bool ticked = false;
  for (const Sample& s : ctx.inputs("dt")) {
    if (!engaged_) continue;
    const double h = std::get<Valuator>(s).value;
    yaw_ += -steer_ * math::deg_to_rad(omega_deg_) * h;
    const Vec3 forward = math::rotate(math::Quat::yaw(yaw_), {0.0, 0.0, -1.0});
    position_ += forward * (-throttle_ * smax_ * h);
    ticked = true;
  }
  if (ticked) ctx.emit("locator", Locator{position_, math::Quat::yaw(yaw_)});
}

void Motorcycle::set_param(std::string_view name, const std::string& value) {
  if (name == "width")
    width_ = parse_double(value, "width");
  else if (name == "height")
    height_ = parse_double(value, "height");
  else if (name == "omega")
    omega_deg_ = parse_double(value, "omega");
  else if (name == "smax")
    smax_ = parse_double(value, "smax");
  else if (name == "origin")
    position_ = parse_vec3(value, "origin");
  else if (name == "yaw0")
    yaw_ = math::deg_to_rad(parse_double(value, "yaw0"));
  else
    Behavior::set_param(name, value);
}

double xz_segment_distance(const Vec3& p, const Vec3& a, const Vec3& b) {
  const double px = p.x - a.x;
  const double pz = p.z - a.z;
  const double dx = b.x - a.x;
  const double dz = b.z - a.z;
  const double len2 = dx * dx + dz * dz;
  double t = len2 > 0.0 ? (px * dx + pz * dz) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  const double qx = px - t * dx;
  const double qz = pz - t * dz;
  return std::sqrt(qx * qx + qz * qz);
}

bool on_paths(const std::vector<Path>& paths, const Vec3& p) {
  for (const Path& path : paths) {
    if (path.vertices.empty()) continue;
    if (path.vertices.size() == 1) {
      if (xz_segment_distance(p, path.vertices[0], path.vertices[0]) <= path.half_width) return true;
      continue;
    }
    for (std::size_t i = 0; i + 1 < path.vertices.size(); ++i)
      if (xz_segment_distance(p, path.vertices[i], path.vertices[i + 1]) <= path.half_width)
        return true;
  }
  return false;
}

InsidePath::InsidePath(std::vector<Path> paths) : paths_(std::move(paths)) {
  valid_ = Locator{start_, math::Quat{}};
}

void InsidePath::finalize() {
  if (!on_paths(paths_, start_))
    fail(Err::InvalidStartPose, "start position is not on any path");
  valid_ = Locator{start_, math::Quat{}};
}

void InsidePath::process(flow::StepContext& ctx) {
  for (const Sample& s : ctx.inputs("candidate")) {
    const Locator& loc = as_locator(s);
    if (on_paths(paths_, loc.position))
      valid_ = loc;
    else
      valid_.orientation = loc.orientation;  // position holds, heading follows
    ctx.emit("locator", valid_);
  }
}

void InsidePath::set_param(std::string_view name, const std::string& value) {
  if (name == "start")
    start_ = parse_vec3(value, "start");
  else
    Behavior::set_param(name, value);
}

MoveUpDn::MoveUpDn(double vy, double y0) : vy_(vy), y_(y0) {}

void MoveUpDn::process(flow::StepContext& ctx) {
  for (const Sample& s : ctx.inputs("up")) up_ = as_button(s).pressed;
  for (const Sample& s : ctx.inputs("down")) down_ = as_button(s).pressed;
  bool ticked = false;
  for (const Sample& s : ctx.inputs("dt")) {
    const double dir = (up_ ? 1.0 : 0.0) - (down_ ? 1.0 : 0.0);
    y_ += dir * vy_ * std::get<Valuator>(s).value;
    ticked = true;
  }
  if (ticked) ctx.emit("y", Valuator{y_});
}

void MoveUpDn::set_param(std::string_view name, const std::string& value) {
  if (name == "vy")
    vy_ = parse_double(value, "vy");
  else if (name == "y0")
    y_ = parse_double(value, "y0");
  else
    Behavior::set_param(name, value);
}

void CombineXZY::process(flow::StepContext& ctx) {
  bool any = false;
  for (const Sample& s : ctx.inputs("ground")) {
    ground_ = as_locator(s);
    any = true;
  }
  for (const Sample& s : ctx.inputs("y")) {
    y_ = std::get<Valuator>(s).value;
    any = true;
  }
  if (!any || !ground_) return;
  Locator out = *ground_;
  if (y_) out.position.y = *y_;
  ctx.emit("locator", out);
}

QuitByButton::QuitByButton(std::string id) : id_(std::move(id)) {}

void QuitByButton::process(flow::StepContext& ctx) {
  for (const Sample& s : ctx.inputs("button")) {
    const Button& b = as_button(s);
    if (b.pressed && (id_.empty() || b.id == id_)) ctx.request_quit();
  }
}

void QuitByButton::set_param(std::string_view name, const std::string& value) {
  if (name == "id")
    id_ = value;
  else
    Behavior::set_param(name, value);
}

void Timer::process(flow::StepContext& ctx) { ctx.emit("value", Valuator{ctx.dt()}); }

Buttons2Locator::Buttons2Locator(double lin, double ang_deg) : lin_(lin), ang_deg_(ang_deg) {}

void Buttons2Locator::process(flow::StepContext& ctx) {
  for (const Sample& s : ctx.inputs("buttons")) {
    const Button& b = as_button(s);
    if (b.pressed)
      held_.insert(b.id);
    else
      held_.erase(b.id);
  }
  if (held_.empty()) return;

  const double dt = ctx.dt();
  auto axis = [this](const char* pos, const char* neg) {
    return double(held_.count(pos)) - double(held_.count(neg));
  };
  pose_.position += Vec3{axis("+x", "-x"), axis("+y", "-y"), axis("+z", "-z")} * (lin_ * dt);

  const double w = math::deg_to_rad(ang_deg_) * dt;
  const double rx = axis("+rx", "-rx");
  const double ry = axis("+ry", "-ry");
  const double rz = axis("+rz", "-rz");
  if (rx != 0.0) pose_.orientation = math::Quat::axis_angle({1, 0, 0}, rx * w) * pose_.orientation;
  if (ry != 0.0) pose_.orientation = math::Quat::axis_angle({0, 1, 0}, ry * w) * pose_.orientation;
  if (rz != 0.0) pose_.orientation = math::Quat::axis_angle({0, 0, 1}, rz * w) * pose_.orientation;
  if (rx != 0.0 || ry != 0.0 || rz != 0.0) pose_.orientation = pose_.orientation.normalized();

  ctx.emit("locator", pose_);
}

void Buttons2Locator::set_param(std::string_view name, const std::string& value) {
  if (name == "lin")
    lin_ = parse_double(value, "lin");
  else if (name == "ang")
    ang_deg_ = parse_double(value, "ang");
  else
    Behavior::set_param(name, value);
}

DeviceSource::DeviceSource(std::string oport) : oport_(std::move(oport)) {}

void DeviceSource::process(flow::StepContext& ctx) {
  for (const DeviceSample& ds : ctx.injected()) ctx.emit(oport_, ds.sample);
}

flow::NodeSpec device_source_spec(const std::string& oport, PortKind kind) {
  flow::NodeSpec s;
  s.outputs = {{oport, kind}};
  s.behavior = std::make_unique<DeviceSource>(oport);
  return s;
}

flow::NodeSpec move_by_locator_spec(std::string object, MoveByLocator::Mode mode,
                                    bool start_disabled) {
  flow::NodeSpec s;
  s.inputs = {{"obj", PortKind::Pick}, {"pos", PortKind::Locator}};
  s.behavior = std::make_unique<MoveByLocator>(std::move(object), mode);
  s.start_disabled = start_disabled;
  return s;
}

flow::NodeSpec location_to_viewpoint_spec() {
  flow::NodeSpec s;
  s.inputs = {{"iportLocator", PortKind::Locator}};
  s.behavior = std::make_unique<MoveByLocator>(scene::SceneState::kViewpointId,
                                               MoveByLocator::Mode::Absolute, "iportLocator",
                                               /*has_obj_port=*/false);
  return s;
}

flow::NodeSpec gogo_filter_spec(double D, double k, Vec3 center) {
  flow::NodeSpec s;
  s.inputs = {{"hand", PortKind::Locator}, {"head", PortKind::Locator}};
  s.outputs = {{"locator", PortKind::Locator}};
  s.behavior = std::make_unique<GoGoFilter>(D, k, center);
  return s;
}

flow::NodeSpec gogo_control_spec(std::string cube, std::string mover, double epsilon) {
  flow::NodeSpec s;
  s.inputs = {{"real", PortKind::Locator}, {"virtual", PortKind::Locator}};
  s.behavior = std::make_unique<GoGoControl>(std::move(cube), std::move(mover), epsilon);
  return s;
}

flow::NodeSpec select_by_pointing_spec(std::vector<std::string> candidates) {
  flow::NodeSpec s;
  s.inputs = {{"pos", PortKind::Locator}};
  s.outputs = {{"pick", PortKind::Pick}};
  s.behavior = std::make_unique<Select1ByPointing>(std::move(candidates));
  return s;
}

flow::NodeSpec select_by_touching_spec(std::string hand, std::vector<std::string> candidates) {
  flow::NodeSpec s;
  s.inputs = {{"pos", PortKind::Locator}};
  s.outputs = {{"pick", PortKind::Pick}};
  s.behavior = std::make_unique<Select1ByTouching>(std::move(hand), std::move(candidates));
  return s;
}

flow::NodeSpec change_object_spec() {
  flow::NodeSpec s;
  s.inputs = {{"obj", PortKind::Pick}};
  s.behavior = std::make_unique<ChangeObject>();
  return s;
}

flow::NodeSpec move_control_spec(std::string selection, std::string mover) {
  flow::NodeSpec s;
  s.inputs = {{"grab", PortKind::Button}, {"release", PortKind::Button}, {"pick", PortKind::Pick}};
  s.outputs = {{"obj", PortKind::Pick}};
  s.behavior = std::make_unique<MoveControl>(std::move(selection), std::move(mover));
  return s;
}

flow::NodeSpec motorcycle_spec() {
  flow::NodeSpec s;
  s.inputs = {{"mouse", PortKind::Locator},
              {"start", PortKind::Button},
              {"stop", PortKind::Button},
              {"dt", PortKind::Valuator}};
  s.outputs = {{"locator", PortKind::Locator}};
  s.behavior = std::make_unique<Motorcycle>(640.0, 480.0, 60.0, 5.0, Vec3{}, 0.0);
  return s;
}

flow::NodeSpec inside_path_spec(std::vector<Path> paths) {
  flow::NodeSpec s;
  s.inputs = {{"candidate", PortKind::Locator}};
  s.outputs = {{"locator", PortKind::Locator}};
  s.behavior = std::make_unique<InsidePath>(std::move(paths));
  return s;
}

flow::NodeSpec move_up_dn_spec() {
  flow::NodeSpec s;
  s.inputs = {{"up", PortKind::Button}, {"down", PortKind::Button}, {"dt", PortKind::Valuator}};
  s.outputs = {{"y", PortKind::Valuator}};
  s.behavior = std::make_unique<MoveUpDn>(1.0, 0.0);
  return s;
}

flow::NodeSpec combine_xzy_spec() {
  flow::NodeSpec s;
  s.inputs = {{"ground", PortKind::Locator}, {"y", PortKind::Valuator}};
  s.outputs = {{"locator", PortKind::Locator}};
  s.behavior = std::make_unique<CombineXZY>();
  return s;
}

flow::NodeSpec quit_by_button_spec() {
  flow::NodeSpec s;
  s.inputs = {{"button", PortKind::Button}};
  s.behavior = std::make_unique<QuitByButton>("");
  return s;
}

flow::NodeSpec timer_spec() {
  flow::NodeSpec s;
  s.outputs = {{"value", PortKind::Valuator}};
  s.behavior = std::make_unique<Timer>();
  return s;
}

flow::NodeSpec buttons_to_locator_spec() {
  flow::NodeSpec s;
  s.inputs = {{"buttons", PortKind::Button}};
  s.outputs = {{"locator", PortKind::Locator}};
  s.behavior = std::make_unique<Buttons2Locator>(0.5, 45.0);
  return s;
}

flow::NodeSpec gogo_it_spec() {
  flow::Dataflow g;
  g.register_node("moveHand", move_by_locator_spec("", MoveByLocator::Mode::Absolute));
  g.register_node("moveCube",
                  move_by_locator_spec("", MoveByLocator::Mode::Absolute, /*start_disabled=*/true));
  g.register_node("gogoFilter", gogo_filter_spec(0.5, 1.0 / 6.0, {}));
  g.register_node("gogoControl", gogo_control_spec("", "moveCube", 1e-6));
  g.register_node("select", select_by_touching_spec(""));
  g.register_node("changeObj", change_object_spec());
  g.connect("gogoFilter", "locator", "moveHand", "pos");
  g.connect("gogoFilter", "locator", "gogoControl", "virtual");
  g.connect("gogoFilter", "locator", "select", "pos");
  g.connect("select", "pick", "changeObj", "obj");

  std::vector<flow::CompositeBehavior::InputMap> ins{
      {"handIport", {{"gogoFilter", "hand"}, {"gogoControl", "real"}, {"moveCube", "pos"}}},
      {"headIport", {{"gogoFilter", "head"}}}};
  std::vector<flow::CompositeBehavior::OutputMap> outs{
      {"gogoPosOPort", {"gogoFilter", "locator"}}, {"pickOPort", {"select", "pick"}}};
  flow::CompositeBehavior::ParamRoutes routes{
      {"hand", {{"moveHand", "object"}, {"select", "hand"}}},
      {"cube", {{"moveCube", "object"}, {"gogoControl", "cube"}}},
      {"D", {{"gogoFilter", "D"}}},
      {"k", {{"gogoFilter", "k"}}},
      {"center", {{"gogoFilter", "center"}}},
      {"epsilon", {{"gogoControl", "epsilon"}}},
      {"candidates", {{"select", "candidates"}}}};
  return flow::make_composite(std::move(g), std::move(ins), std::move(outs), std::move(routes));
}

flow::NodeSpec raycast_it_spec() {
  flow::Dataflow g;
  g.register_node("moveHand", move_by_locator_spec("", MoveByLocator::Mode::Absolute));
  g.register_node("moveLine", move_by_locator_spec("", MoveByLocator::Mode::Absolute));
  g.register_node("select", select_by_pointing_spec());
  g.register_node("changeObj", change_object_spec());
  g.connect("select", "pick", "changeObj", "obj");

  std::vector<flow::CompositeBehavior::InputMap> ins{
      {"hand", {{"moveHand", "pos"}, {"moveLine", "pos"}, {"select", "pos"}}}};
  std::vector<flow::CompositeBehavior::OutputMap> outs{{"pick", {"select", "pick"}}};
  flow::CompositeBehavior::ParamRoutes routes{{"hand", {{"moveHand", "object"}}},
                                              {"line", {{"moveLine", "object"}}},
                                              {"candidates", {{"select", "candidates"}}}};
  return flow::make_composite(std::move(g), std::move(ins), std::move(outs), std::move(routes));
}

}  // namespace itflow::filters
