// Staging queue between device producer threads and the stepping thread.
// Producers push timestamped samples at any rate; the stepper drains every
// sample due at the current step time in one batch. Each device either queues
// all samples or keeps only the newest undelivered one.
#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "errors.hpp"
#include "sample.hpp"

namespace itflow::devices {

enum class QueueMode { QueueAll, KeepLast };

// Discrete events must not be dropped; continuous streams may collapse.
inline QueueMode default_mode(PortKind kind) {
  return (kind == PortKind::Button || kind == PortKind::Pick) ? QueueMode::QueueAll
                                                              : QueueMode::KeepLast;
}

class DeviceQueue {
 public:
  void register_device(const std::string& id, PortKind kind, QueueMode mode);
  void register_device(const std::string& id, PortKind kind) {
    register_device(id, kind, default_mode(kind));
  }

  bool has_device(const std::string& id) const;
  PortKind device_kind(const std::string& id) const;

  // Timestamps must be non-decreasing per device.
  void push(DeviceSample sample);

  // Removes and returns every pending sample with timestamp <= t, ordered by
  // (timestamp, device id, arrival). Successive calls must not move t
  // backwards.
  std::vector<DeviceSample> drain_upto(double t);

 private:
  struct Pending {
    DeviceSample sample;
    std::uint64_t arrival = 0;
  };
  struct Entry {
    PortKind kind = PortKind::Locator;
    QueueMode mode = QueueMode::QueueAll;
    std::vector<Pending> pending;
    double last_timestamp = 0.0;
    bool saw_sample = false;
  };

  mutable std::mutex mutex_;
  std::map<std::string, Entry> devices_;
  std::uint64_t arrivals_ = 0;
  double last_drain_ = 0.0;
  bool drained_ = false;
};

}  // namespace itflow::devices
