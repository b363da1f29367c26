#include "htmsp/lane_pool.hpp"

#include <algorithm>

namespace htmsp {
namespace {

std::pair<int, int> chunk(int lane, int lanes, int count) {
  const int base = count / lanes;
  const int extra = count % lanes;
  const int begin = lane * base + std::min(lane, extra);
  return {begin, begin + base + (lane < extra ? 1 : 0)};
}

}  // namespace

LanePool::LanePool(int lanes) {
  if (lanes <= 0) lanes = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  lanes_ = lanes;
  // lane 0 runs on the calling thread
  for (int lane = 1; lane < lanes_; ++lane) threads_.emplace_back([this, lane] { worker(lane); });
}

LanePool::~LanePool() {
  {
    std::lock_guard lock(mutex_);
    stop_ = true;
  }
  start_cv_.notify_all();
  for (auto& t : threads_) t.join();
}

void LanePool::run(int count, const Task& task) {
  if (lanes_ == 1 || count <= 1) {
    task(0, 0, count);
    return;
  }
  {
    std::lock_guard lock(mutex_);
    task_ = &task;
    count_ = count;
    pending_ = lanes_ - 1;
    ++generation_;
  }
  start_cv_.notify_all();
  const auto [begin, end] = chunk(0, lanes_, count);
  task(0, begin, end);
  std::unique_lock lock(mutex_);
  done_cv_.wait(lock, [this] { return pending_ == 0; });
  task_ = nullptr;
}

void LanePool::worker(int lane) {
  unsigned seen = 0;
  for (;;) {
    const Task* task;
    int count;
    {
      std::unique_lock lock(mutex_);
      start_cv_.wait(lock, [&] { return stop_ || generation_ != seen; });
      if (stop_) return;
      seen = generation_;
      task = task_;
      count = count_;
    }
    const auto [begin, end] = chunk(lane, lanes_, count);
    if (begin < end) (*task)(lane, begin, end);
    {
      std::lock_guard lock(mutex_);
      --pending_;
    }
    done_cv_.notify_one();
  }
}

}  // namespace htmsp
