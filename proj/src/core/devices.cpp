#include "devices.hpp"

#include <algorithm>

namespace itflow::devices {

void DeviceQueue::register_device(const std::string& id, PortKind kind, QueueMode mode) {
  std::lock_guard lock(mutex_);
  auto [it, inserted] = devices_.emplace(id, Entry{kind, mode, {}, 0.0, false});
  if (!inserted) fail(Err::DuplicateId, "device '" + id + "' already registered");
}

bool DeviceQueue::has_device(const std::string& id) const {
  std::lock_guard lock(mutex_);
  return devices_.count(id) != 0;
}

PortKind DeviceQueue::device_kind(const std::string& id) const {
  std::lock_guard lock(mutex_);
  auto it = devices_.find(id);
  if (it == devices_.end()) fail(Err::UnknownDevice, "no device registered as '" + id + "'");
  return it->second.kind;
}

void DeviceQueue::push(DeviceSample sample) {
  std::lock_guard lock(mutex_);
  auto it = devices_.find(sample.device);
  if (it == devices_.end())
    fail(Err::UnknownDevice, "no device registered as '" + sample.device + "'");
  Entry& entry = it->second;
  if (kind_of(sample.sample) != entry.kind)
    fail(Err::TypeMismatch, "device '" + sample.device + "' expects " +
                                std::string(to_string(entry.kind)) + " samples");
  if (entry.saw_sample && sample.timestamp < entry.last_timestamp)
    fail(Err::UnsortedTimestamps, "device '" + sample.device + "' timestamp went backwards");
  entry.last_timestamp = sample.timestamp;
  entry.saw_sample = true;
  if (entry.mode == QueueMode::KeepLast) entry.pending.clear();
  entry.pending.push_back({std::move(sample), arrivals_++});
}

std::vector<DeviceSample> DeviceQueue::drain_upto(double t) {
  std::lock_guard lock(mutex_);
  if (drained_ && t < last_drain_)
    fail(Err::InvalidParam, "drain_upto must not move backwards in time");
  last_drain_ = t;
  drained_ = true;

  std::vector<Pending> due;
  for (auto& [id, entry] : devices_) {
    auto split = std::stable_partition(entry.pending.begin(), entry.pending.end(),
                                       [t](const Pending& p) { return p.sample.timestamp <= t; });
    due.insert(due.end(), std::make_move_iterator(entry.pending.begin()),
               std::make_move_iterator(split));
    entry.pending.erase(entry.pending.begin(), split);
  }
  std::sort(due.begin(), due.end(), [](const Pending& a, const Pending& b) {
    if (a.sample.timestamp != b.sample.timestamp) return a.sample.timestamp < b.sample.timestamp;
    if (a.sample.device != b.sample.device) return a.sample.device < b.sample.device;
    return a.arrival < b.arrival;
  });

  std::vector<DeviceSample> out;
  out.reserve(due.size());
  for (Pending& p : due) out.push_back(std::move(p.sample));
  return out;
}

}  // namespace itflow::devices
