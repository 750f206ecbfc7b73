// Interaction technique library: the filters users wire into worlds, plus the
// two packaged composites. Selection filters emit a Pick only when the
// selection changes; control filters coordinate other nodes through control
// messages rather than touching them directly.
#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "flow.hpp"
#include "scene.hpp"

namespace itflow::filters {

// Radial arm extension: identity below threshold D, quadratic growth beyond.
double gogo_extent(double r, double D, double k);
math::Vec3 gogo_map(const math::Vec3& hand, const math::Vec3& origin, double D, double k);

// Writes incoming locator samples onto a scene object (or the viewpoint).
// Absolute mode copies the pose; offset mode applies pose deltas relative to
// the previous sample, re-anchoring whenever the target changes or the filter
// is re-enabled.
class MoveByLocator : public flow::Behavior {
 public:
  enum class Mode { Absolute, Offset };

  MoveByLocator(std::string object, Mode mode, std::string pos_port = "pos", bool has_obj_port = true);

  void process(flow::StepContext& ctx) override;
  void set_param(std::string_view name, const std::string& value) override;
  void enabled_changed(bool enabled) override;

  const std::string& target() const { return target_; }
  Mode mode() const { return mode_; }

 private:
  std::string target_;
  Mode mode_;
  std::string pos_port_;
  bool has_obj_port_;
  std::optional<Locator> reference_;
};

class GoGoFilter : public flow::Behavior {
 public:
  GoGoFilter(double D, double k, math::Vec3 center);

  void process(flow::StepContext& ctx) override;
  void set_param(std::string_view name, const std::string& value) override;

 private:
  double d_;
  double k_;
  math::Vec3 center_;
  std::optional<math::Vec3> head_;
};

// Watches the real and mapped hand poses; when they diverge it shows a marker
// object at the virtual position (driven by a mover it enables) and hides it
// again once they coincide. State changes are edge-triggered.
class GoGoControl : public flow::Behavior {
 public:
  GoGoControl(std::string cube, std::string mover, double epsilon);

  void process(flow::StepContext& ctx) override;
  void set_param(std::string_view name, const std::string& value) override;

 private:
  std::string cube_;
  std::string mover_;
  double epsilon_;
  std::optional<math::Vec3> real_;
  std::optional<math::Vec3> virtual_;
  std::optional<bool> diverged_;
};

// Ray pick: nearest selectable visible object along the locator's forward
// axis. Emits only on selection changes; the initial selection is empty.
class Select1ByPointing : public flow::Behavior {
 public:
  explicit Select1ByPointing(std::vector<std::string> candidates);

  void process(flow::StepContext& ctx) override;
  void set_param(std::string_view name, const std::string& value) override;

 private:
  std::vector<std::string> candidates_;
  std::optional<std::string> picked_;
};

// Volume pick: the candidate whose box overlaps the hand object's box, ties
// by center distance then id. The pos input only gates evaluation; collision
// uses the hand object's current transform.
class Select1ByTouching : public flow::Behavior {
 public:
  Select1ByTouching(std::string hand, std::vector<std::string> candidates);

  void process(flow::StepContext& ctx) override;
  void set_param(std::string_view name, const std::string& value) override;

 private:
  std::string hand_;
  std::vector<std::string> candidates_;
  std::optional<std::string> picked_;
};

// Moves the bounding-box highlight to follow incoming picks.
class ChangeObject : public flow::Behavior {
 public:
  void process(flow::StepContext& ctx) override;

 private:
  std::optional<std::string> highlighted_;
};

// Grab/release state machine: while selecting, the selection technique is
// active and the mover disabled; grabbing the current pick swaps both and
// forwards the pick to the mover.
class MoveControl : public flow::Behavior {
 public:
  enum class Phase { Selecting, Moving };

  MoveControl(std::string selection, std::string mover);

  void process(flow::StepContext& ctx) override;
  void set_param(std::string_view name, const std::string& value) override;

  Phase phase() const { return phase_; }
  const std::string& selection() const { return selection_; }
  const std::string& mover() const { return mover_; }
  const std::optional<std::string>& current_pick() const { return pick_; }
  void set_selection(std::string node) { selection_ = std::move(node); }

 private:
  std::string selection_;
  std::string mover_;
  Phase phase_ = Phase::Selecting;
  std::optional<std::string> pick_;
  bool initialized_ = false;
};

// Swaps the selection technique driving a MoveControl node: rewires the pick
// edge to the new technique (which must expose a Pick output) and aligns its
// enabled state with the control's current phase.
void set_selection_it(flow::Dataflow& flow, const std::string& control_node,
                      const std::string& it_node);

// Vehicle-style navigation: normalized mouse x steers, y throttles; motion
// integrates only while engaged (start/stop buttons).
class Motorcycle : public flow::Behavior {
 public:
  Motorcycle(double width, double height, double omega_deg, double smax, math::Vec3 origin,
             double yaw0_deg);

  void process(flow::StepContext& ctx) override;
  void set_param(std::string_view name, const std::string& value) override;

 private:
  double width_;
  double height_;
  double omega_deg_;
  double smax_;
  math::Vec3 position_;
  double yaw_;
  double steer_ = 0.0;
  double throttle_ = 0.0;
  bool engaged_ = false;
};

struct Path {
  double half_width = 1.0;
  std::vector<math::Vec3> vertices;
};

// Distance in the ground plane from point p to the segment a-b (y ignored).
double xz_segment_distance(const math::Vec3& p, const math::Vec3& a, const math::Vec3& b);
bool on_paths(const std::vector<Path>& paths, const math::Vec3& p);

// Constrains candidate positions to the path network: off-path candidates are
// clamped to the last valid position (orientation passes through).
class InsidePath : public flow::Behavior {
 public:
  explicit InsidePath(std::vector<Path> paths);

  void process(flow::StepContext& ctx) override;
  void set_param(std::string_view name, const std::string& value) override;
  void finalize() override;

 private:
  std::vector<Path> paths_;
  math::Vec3 start_;
  Locator valid_;
};

// Vertical rate control from two buttons; emits the accumulated height every
// timed step.
class MoveUpDn : public flow::Behavior {
 public:
  MoveUpDn(double vy, double y0);

  void process(flow::StepContext& ctx) override;
  void set_param(std::string_view name, const std::string& value) override;

 private:
  double vy_;
  double y_;
  bool up_ = false;
  bool down_ = false;
};

// Merges ground-plane motion with an independent height channel.
class CombineXZY : public flow::Behavior {
 public:
  void process(flow::StepContext& ctx) override;

 private:
  std::optional<Locator> ground_;
  std::optional<double> y_;
};

class QuitByButton : public flow::Behavior {
 public:
  explicit QuitByButton(std::string id);

  void process(flow::StepContext& ctx) override;
  void set_param(std::string_view name, const std::string& value) override;

 private:
  std::string id_;  // empty matches any button
};

// Emits the step duration each step; the clock source for timed filters.
class Timer : public flow::Behavior {
 public:
  void process(flow::StepContext& ctx) override;
};

// Adapts a 12-button pad to a locator: held buttons translate along or rotate
// about the world axes at fixed rates. Presses and releases apply before the
// step integrates, so a button held from step a to step b moves for exactly
// (b - a) steps.
class Buttons2Locator : public flow::Behavior {
 public:
  Buttons2Locator(double lin, double ang_deg);

  void process(flow::StepContext& ctx) override;
  void set_param(std::string_view name, const std::string& value) override;

 private:
  double lin_;
  double ang_deg_;
  std::set<std::string> held_;
  Locator pose_;
};

// Source node for a virtual input device: re-emits injected device samples
// on its single output port.
class DeviceSource : public flow::Behavior {
 public:
  explicit DeviceSource(std::string oport);

  void process(flow::StepContext& ctx) override;

 private:
  std::string oport_;
};

flow::NodeSpec device_source_spec(const std::string& oport, PortKind kind);

// NodeSpec builders used by the factory registry and by the composites.
flow::NodeSpec move_by_locator_spec(std::string object, MoveByLocator::Mode mode,
                                    bool start_disabled = false);
flow::NodeSpec location_to_viewpoint_spec();
flow::NodeSpec gogo_filter_spec(double D, double k, math::Vec3 center);
flow::NodeSpec gogo_control_spec(std::string cube, std::string mover, double epsilon);
flow::NodeSpec select_by_pointing_spec(std::vector<std::string> candidates = {});
flow::NodeSpec select_by_touching_spec(std::string hand, std::vector<std::string> candidates = {});
flow::NodeSpec change_object_spec();
flow::NodeSpec move_control_spec(std::string selection, std::string mover);
flow::NodeSpec motorcycle_spec();
flow::NodeSpec inside_path_spec(std::vector<Path> paths);
flow::NodeSpec move_up_dn_spec();
flow::NodeSpec combine_xzy_spec();
flow::NodeSpec quit_by_button_spec();
flow::NodeSpec timer_spec();
flow::NodeSpec buttons_to_locator_spec();

// Encapsulated techniques. Internal node ids are fixed (moveHand, moveCube,
// gogoFilter, gogoControl, select, changeObj / moveHand, moveLine, select,
// changeObj); parameters route through to the internal filters.
flow::NodeSpec gogo_it_spec();
flow::NodeSpec raycast_it_spec();

}  // namespace itflow::filters
