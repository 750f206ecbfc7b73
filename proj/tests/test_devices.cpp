#include <doctest.h>

#include <atomic>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include "core/devices.hpp"

using namespace itflow;
using devices::DeviceQueue;
using devices::QueueMode;

TEST_CASE("default queue modes depend on the sample kind") {
  CHECK(devices::default_mode(PortKind::Locator) == QueueMode::KeepLast);
  CHECK(devices::default_mode(PortKind::Valuator) == QueueMode::KeepLast);
  CHECK(devices::default_mode(PortKind::Button) == QueueMode::QueueAll);
  CHECK(devices::default_mode(PortKind::Pick) == QueueMode::QueueAll);
}

TEST_CASE("registration rejects duplicates, pushes validate device and kind") {
  DeviceQueue q;
  q.register_device("tracker", PortKind::Locator);
  CHECK_THROWS_WITH_AS(q.register_device("tracker", PortKind::Locator),
                       doctest::Contains("DuplicateId"), Error);
  CHECK(q.has_device("tracker"));
  CHECK_FALSE(q.has_device("pad"));
  CHECK(q.device_kind("tracker") == PortKind::Locator);
  CHECK_THROWS_AS(q.device_kind("pad"), Error);

  CHECK_THROWS_WITH_AS(q.push({"pad", 0.0, Button{"a", true}}),
                       doctest::Contains("UnknownDevice"), Error);
  CHECK_THROWS_WITH_AS(q.push({"tracker", 0.0, Button{"a", true}}),
                       doctest::Contains("TypeMismatch"), Error);
}

TEST_CASE("timestamps must not go backwards per device") {
  DeviceQueue q;
  q.register_device("a", PortKind::Button);
  q.register_device("b", PortKind::Button);
  q.push({"a", 1.0, Button{"x", true}});
  q.push({"b", 0.5, Button{"x", true}});  // other devices are independent
  q.push({"a", 1.0, Button{"x", false}});
  CHECK_THROWS_WITH_AS(q.push({"a", 0.9, Button{"x", true}}),
                       doctest::Contains("UnsortedTimestamps"), Error);
}

TEST_CASE("keep-last retains only the freshest pending sample") {
  DeviceQueue q;
  q.register_device("tracker", PortKind::Locator);
  q.push({"tracker", 0.1, Locator{{1, 0, 0}, {}}});
  q.push({"tracker", 0.2, Locator{{2, 0, 0}, {}}});
  q.push({"tracker", 0.3, Locator{{3, 0, 0}, {}}});
  const auto batch = q.drain_upto(1.0);
  REQUIRE(batch.size() == 1);
  CHECK(batch[0].timestamp == 0.3);
  CHECK(std::get<Locator>(batch[0].sample).position == math::Vec3{3, 0, 0});
}

TEST_CASE("queue-all keeps every sample in order") {
  DeviceQueue q;
  q.register_device("pad", PortKind::Button);
  q.push({"pad", 0.1, Button{"x", true}});
  q.push({"pad", 0.2, Button{"x", false}});
  const auto batch = q.drain_upto(1.0);
  REQUIRE(batch.size() == 2);
  CHECK(std::get<Button>(batch[0].sample).pressed == true);
  CHECK(std::get<Button>(batch[1].sample).pressed == false);
}

TEST_CASE("drain merges devices by timestamp, then device id, then arrival") {
  DeviceQueue q;
  q.register_device("b", PortKind::Button);
  q.register_device("a", PortKind::Button);
  q.push({"b", 0.1, Button{"1", true}});
  q.push({"a", 0.2, Button{"2", true}});
  q.push({"a", 0.2, Button{"3", true}});
  q.push({"b", 0.2, Button{"4", true}});
  const auto batch = q.drain_upto(1.0);
  REQUIRE(batch.size() == 4);
  CHECK(std::get<Button>(batch[0].sample).id == "1");  // t=0.1
  CHECK(std::get<Button>(batch[1].sample).id == "2");  // t=0.2, device a, first
  CHECK(std::get<Button>(batch[2].sample).id == "3");  // t=0.2, device a, second
  CHECK(std::get<Button>(batch[3].sample).id == "4");  // t=0.2, device b
}

TEST_CASE("drain takes due samples only and never walks backwards") {
  DeviceQueue q;
  q.register_device("pad", PortKind::Button);
  q.push({"pad", 0.5, Button{"early", true}});
  q.push({"pad", 1.0, Button{"edge", true}});
  q.push({"pad", 1.5, Button{"late", true}});

  auto batch = q.drain_upto(1.0);  // boundary is inclusive
  REQUIRE(batch.size() == 2);
  CHECK(std::get<Button>(batch[1].sample).id == "edge");

  CHECK_THROWS_WITH_AS(q.drain_upto(0.9), doctest::Contains("InvalidParam"), Error);

  batch = q.drain_upto(2.0);
  REQUIRE(batch.size() == 1);
  CHECK(std::get<Button>(batch[0].sample).id == "late");
  CHECK(q.drain_upto(3.0).empty());
}

TEST_CASE("an explicit mode overrides the default") {
  DeviceQueue q;
  q.register_device("tracker", PortKind::Locator, QueueMode::QueueAll);
  q.push({"tracker", 0.1, Locator{{1, 0, 0}, {}}});
  q.push({"tracker", 0.2, Locator{{2, 0, 0}, {}}});
  CHECK(q.drain_upto(1.0).size() == 2);
}

TEST_CASE("concurrent producers stay ordered and lose nothing") {
  DeviceQueue q;
  constexpr int kThreads = 4;
  constexpr int kPerThread = 500;
  for (int i = 0; i < kThreads; ++i)
    q.register_device("dev" + std::to_string(i), PortKind::Button, QueueMode::QueueAll);

  std::atomic<bool> go{false};
  std::vector<std::thread> workers;
  for (int i = 0; i < kThreads; ++i) {
    workers.emplace_back([&q, &go, i] {
      while (!go.load()) std::this_thread::yield();
      const std::string dev = "dev" + std::to_string(i);
      for (int n = 0; n < kPerThread; ++n)
        q.push({dev, static_cast<double>(n), Button{std::to_string(n), true}});
    });
  }
  go = true;

  std::vector<DeviceSample> all;
  for (int rounds = 0; rounds < 50 && all.size() < kThreads * kPerThread; ++rounds) {
    auto batch = q.drain_upto(static_cast<double>(kPerThread + rounds));
    all.insert(all.end(), batch.begin(), batch.end());
    std::this_thread::yield();
  }
  for (auto& w : workers) w.join();
  auto batch = q.drain_upto(static_cast<double>(kPerThread + 60));
  all.insert(all.end(), batch.begin(), batch.end());

  CHECK(all.size() == kThreads * kPerThread);
  std::map<std::string, int> next;
  for (const DeviceSample& s : all) {
    const int expected = next[s.device]++;
    CHECK(std::get<Button>(s.sample).id == std::to_string(expected));
    if (std::get<Button>(s.sample).id != std::to_string(expected)) break;
  }
  for (int i = 0; i < kThreads; ++i) CHECK(next["dev" + std::to_string(i)] == kPerThread);
}
