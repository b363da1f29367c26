#pragma once

#include <condition_variable>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace htmsp {

/// Fixed set of worker lanes. run() splits an index range into contiguous
/// chunks, one per lane, and returns once every chunk has finished.
class LanePool {
 public:
  using Task = std::function<void(int lane, int begin, int end)>;

  /// lanes <= 0 selects std::thread::hardware_concurrency().
  explicit LanePool(int lanes = 0);
  ~LanePool();

  LanePool(const LanePool&) = delete;
  LanePool& operator=(const LanePool&) = delete;

  int lanes() const { return lanes_; }
  void run(int count, const Task& task);

 private:
  void worker(int lane);

  int lanes_;
  std::vector<std::thread> threads_;
  std::mutex mutex_;
  std::condition_variable start_cv_;
  std::condition_variable done_cv_;
  const Task* task_ = nullptr;
  int count_ = 0;
  unsigned generation_ = 0;
  int pending_ = 0;
  bool stop_ = false;
};

}  // namespace htmsp
