#pragma once

#include <condition_variable>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace smpc {

/// Fixed-size thread pool for data-parallel loops. Work is split into one
/// contiguous chunk per worker (static schedule); the calling thread executes
/// chunk 0 and blocks until the loop completes. Exceptions thrown by the body
/// are captured and rethrown on the caller.
class WorkerPool {
 public:
  /// num_workers <= 0 selects the hardware concurrency.
  explicit WorkerPool(int num_workers = 0);
  ~WorkerPool();

  WorkerPool(const WorkerPool&) = delete;
  WorkerPool& operator=(const WorkerPool&) = delete;

  int size() const { return size_; }

  /// Calls body(begin, end) over a partition of [0, n). Deterministic chunk
  /// boundaries: chunk i covers [i*n/W, (i+1)*n/W).
  void parallel_for(int64_t n, const std::function<void(int64_t, int64_t)>& body);

 private:
  void worker_main(int worker_index);
  void run_chunk(int chunk_index, int total_chunks);

  int size_ = 1;
  std::vector<std::thread> threads_;

  std::mutex mutex_;
  std::condition_variable cv_work_;
  std::condition_variable cv_done_;
  uint64_t job_id_ = 0;
  int64_t job_n_ = 0;
  const std::function<void(int64_t, int64_t)>* job_body_ = nullptr;
  int pending_ = 0;
  std::exception_ptr first_error_;
  bool stop_ = false;
};

}  // namespace smpc
