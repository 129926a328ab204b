#include "smpc/worker_pool.hpp"

namespace smpc {

WorkerPool::WorkerPool(int num_workers) {
  if (num_workers <= 0) {
    const unsigned hw = std::thread::hardware_concurrency();
    num_workers = hw > 0 ? static_cast<int>(hw) : 1;
  }
  size_ = num_workers;
  threads_.reserve(static_cast<size_t>(size_ - 1));
  for (int i = 1; i < size_; ++i) {
    threads_.emplace_back([this, i] { worker_main(i); });
  }
}

WorkerPool::~WorkerPool() {
  {
    std::lock_guard<std::mutex> lock(mutex_);
    stop_ = true;
  }
  cv_work_.notify_all();
  for (auto& t : threads_) t.join();
}

void WorkerPool::run_chunk(int chunk_index, int total_chunks) {
  const int64_t begin = job_n_ * chunk_index / total_chunks;
  const int64_t end = job_n_ * (chunk_index + 1) / total_chunks;
  if (begin >= end) return;
  try {
    (*job_body_)(begin, end);
  } catch (...) {
    std::lock_guard<std::mutex> lock(mutex_);
    if (!first_error_) first_error_ = std::current_exception();
  }
}

void WorkerPool::worker_main(int worker_index) {
  uint64_t seen = 0;
  for (;;) {
    {
      std::unique_lock<std::mutex> lock(mutex_);
      cv_work_.wait(lock, [&] { return stop_ || job_id_ != seen; });
      if (stop_) return;
      seen = job_id_;
    }
    run_chunk(worker_index, size_);
    {
      std::lock_guard<std::mutex> lock(mutex_);
      if (--pending_ == 0) cv_done_.notify_one();
    }
  }
}

void WorkerPool::parallel_for(int64_t n, const std::function<void(int64_t, int64_t)>& body) {
  if (n <= 0) return;
  if (size_ == 1) {
    body(0, n);
    return;
  }
  {
    std::lock_guard<std::mutex> lock(mutex_);
    job_n_ = n;
    job_body_ = &body;
    pending_ = size_ - 1;
    first_error_ = nullptr;
    ++job_id_;
  }
  cv_work_.notify_all();
  run_chunk(0, size_);
  std::exception_ptr err;
  {
    std::unique_lock<std::mutex> lock(mutex_);
    cv_done_.wait(lock, [&] { return pending_ == 0; });
    job_body_ = nullptr;
    err = first_error_;
    first_error_ = nullptr;
  }
  if (err) std::rethrow_exception(err);
}

}  // namespace smpc
