#include "mipseg/parallel.hpp"

#include <condition_variable>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <vector>

namespace mipseg {

namespace {

// Persistent pool; workers sleep on a generation counter. The caller
// executes chunk 0 itself.
class Pool {
 public:
  static Pool& instance() {
    static Pool pool;
    return pool;
  }

  void resize(int workers) {
    stop_workers();
    std::lock_guard<std::mutex> lk(m_);
    target_workers_ = workers;
  }

  void run(int chunks, const std::function<void(int)>& chunk_fn) {
    ensure_workers();
    {
      std::lock_guard<std::mutex> lk(m_);
      chunk_fn_ = &chunk_fn;
      chunks_ = chunks;
      next_chunk_ = 1;
      done_ = 0;
      ++generation_;
    }
    cv_.notify_all();
    chunk_fn(0);
    std::unique_lock<std::mutex> lk(m_);
    done_cv_.wait(lk, [&] { return done_ == chunks_ - 1; });
    chunk_fn_ = nullptr;
  }

 private:
  Pool() = default;
  ~Pool() { stop_workers(); }

  void ensure_workers() {
    std::lock_guard<std::mutex> lk(m_);
    while (int(threads_.size()) < target_workers_)
      threads_.emplace_back([this] { worker(); });
  }

  void stop_workers() {
    {
      std::lock_guard<std::mutex> lk(m_);
      stopping_ = true;
      ++generation_;
    }
    cv_.notify_all();
    for (auto& t : threads_) t.join();
    threads_.clear();
    std::lock_guard<std::mutex> lk(m_);
    stopping_ = false;
  }

  void worker() {
    std::uint64_t seen = 0;
    while (true) {
      const std::function<void(int)>* fn = nullptr;
      {
        std::unique_lock<std::mutex> lk(m_);
        cv_.wait(lk, [&] { return generation_ != seen; });
        seen = generation_;
        if (stopping_) return;
        fn = chunk_fn_;
      }
      if (!fn) continue;
      while (true) {
        int c;
        {
          std::lock_guard<std::mutex> lk(m_);
          // A new generation may have started once this one's chunks were
          // all claimed; never touch its queue with the old fn.
          if (generation_ != seen || next_chunk_ >= chunks_) break;
          c = next_chunk_++;
        }
        (*fn)(c);
        {
          std::lock_guard<std::mutex> lk(m_);
          ++done_;
        }
        done_cv_.notify_one();
      }
    }
  }

  std::mutex m_;
  std::condition_variable cv_, done_cv_;
  std::vector<std::thread> threads_;
  const std::function<void(int)>* chunk_fn_ = nullptr;
  int chunks_ = 0, next_chunk_ = 0, done_ = 0;
  int target_workers_ = 0;
  std::uint64_t generation_ = 0;
  bool stopping_ = false;
};

int g_threads = 1;

}  // namespace

void set_thread_count(int n) {
  if (n < 1) throw std::invalid_argument("thread count must be >= 1");
  g_threads = n;
  Pool::instance().resize(n - 1);
}

int thread_count() { return g_threads; }

void parallel_for(std::int64_t n,
                  const std::function<void(std::int64_t, std::int64_t)>& fn) {
  if (n <= 0) return;
  int t = g_threads;
  if (t <= 1 || n == 1) {
    fn(0, n);
    return;
  }
  int chunks = int(std::min<std::int64_t>(t, n));
  Pool::instance().run(chunks, [&](int c) {
    std::int64_t begin = n * c / chunks;
    std::int64_t end = n * (c + 1) / chunks;
    fn(begin, end);
  });
}

}  // namespace mipseg
