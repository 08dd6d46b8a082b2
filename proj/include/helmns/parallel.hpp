#ifndef HELMNS_PARALLEL_HPP
#define HELMNS_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <memory>
#include <thread>
#include <vector>

// Deterministic data-parallel helpers. Results never depend on the worker
// count: parallel_for requires every index to be independent, and
// block_reduce_* fix the combination order (fixed block size, blocks
// combined in index order) so reductions are bitwise reproducible.

namespace helmns::par {

/// Worker cap: HELMNS_THREADS if set (>=1), else hardware concurrency.
inline int max_workers() {
    if (const char* env = std::getenv("HELMNS_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end != env && v >= 1) return static_cast<int>(std::min(v, 256L));
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

namespace detail {

/// Persistent worker pool. Chunk boundaries are fixed before dispatch and
/// chunks write disjoint state, so which thread runs which chunk cannot
/// affect results. Nested calls from a worker run inline. Each dispatch
/// owns a Job object shared with the workers; a worker waking late sees
/// only its exhausted old job and goes back to sleep.
class Pool {
  public:
    static Pool& instance() {
        static Pool pool;
        return pool;
    }

    static bool& in_worker() {
        thread_local bool flag = false;
        return flag;
    }

    void run(int nchunks, const std::function<void(int)>& chunk_fn) {
        if (nchunks <= 1 || in_worker()) {
            for (int i = 0; i < nchunks; ++i) chunk_fn(i);
            return;
        }
        std::lock_guard<std::mutex> serial(run_mutex_);
        ensure_threads(std::min(max_workers(), nchunks) - 1);
        auto job = std::make_shared<Job>();
        job->fn = &chunk_fn;
        job->total = nchunks;
        job->remaining.store(nchunks, std::memory_order_relaxed);
        {
            std::lock_guard<std::mutex> lk(m_);
            job_ = job;
            ++epoch_;
        }
        cv_.notify_all();
        work(*job);
        std::unique_lock<std::mutex> lk(m_);
        done_cv_.wait(lk, [&] { return job->remaining.load(std::memory_order_acquire) == 0; });
        job_ = nullptr;
        if (job->failure) std::rethrow_exception(job->failure);
    }

    ~Pool() {
        {
            std::lock_guard<std::mutex> lk(m_);
            stop_ = true;
        }
        cv_.notify_all();
        for (auto& t : threads_) t.join();
    }

  private:
    struct Job {
        const std::function<void(int)>* fn = nullptr;
        std::atomic<int> next{0};
        std::atomic<int> remaining{0};
        int total = 0;
        std::exception_ptr failure = nullptr;  // guarded by the pool mutex
    };

    void ensure_threads(int want) {
        while (static_cast<int>(threads_.size()) < want)
            threads_.emplace_back([this] { thread_main(); });
    }

    void work(Job& job) {
        while (true) {
            const int i = job.next.fetch_add(1, std::memory_order_relaxed);
            if (i >= job.total) break;
            try {
                (*job.fn)(i);
            } catch (...) {
                std::lock_guard<std::mutex> lk(m_);
                if (!job.failure) job.failure = std::current_exception();
            }
            if (job.remaining.fetch_sub(1, std::memory_order_acq_rel) == 1) {
                std::lock_guard<std::mutex> lk(m_);
                done_cv_.notify_all();
            }
        }
    }

    void thread_main() {
        in_worker() = true;
        std::uint64_t seen = 0;
        std::unique_lock<std::mutex> lk(m_);
        while (true) {
            cv_.wait(lk, [&] { return stop_ || (epoch_ != seen && job_ != nullptr); });
            if (stop_) return;
            seen = epoch_;
            auto job = job_;
            lk.unlock();
            work(*job);
            lk.lock();
        }
    }

    std::mutex run_mutex_;
    std::mutex m_;
    std::condition_variable cv_, done_cv_;
    std::vector<std::thread> threads_;
    std::shared_ptr<Job> job_;
    std::uint64_t epoch_ = 0;
    bool stop_ = false;
};

}  // namespace detail

/// Jobs below this many scalar operations run inline: lightweight
/// memory-bound sweeps lose more to scheduling and bandwidth contention
/// than threads recover.
inline constexpr std::size_t kMinParallelWork = std::size_t{1} << 20;

/// Runs fn(begin, end) over contiguous sub-ranges of [begin, end).
/// work_per_item is a rough operation count per index, used only to decide
/// whether the pool is worth engaging.
template <typename Fn>
void parallel_for_ranges(std::size_t begin, std::size_t end, Fn&& fn,
                         std::size_t work_per_item = 1) {
    const std::size_t count = end > begin ? end - begin : 0;
    if (count == 0) return;
    const int workers =
        static_cast<int>(std::min<std::size_t>(count, static_cast<std::size_t>(max_workers())));
    if (workers <= 1 || count * work_per_item < kMinParallelWork) {
        fn(begin, end);
        return;
    }
    const std::size_t chunk = (count + workers - 1) / workers;
    std::function<void(int)> chunk_fn = [&](int w) {
        const std::size_t lo = begin + chunk * static_cast<std::size_t>(w);
        const std::size_t hi = std::min(end, lo + chunk);
        if (lo < hi) fn(lo, hi);
    };
    detail::Pool::instance().run(workers, chunk_fn);
}

/// Runs fn(i) for every i in [begin, end); fn must not touch state shared
/// with other indices.
template <typename Fn>
void parallel_for(std::size_t begin, std::size_t end, Fn&& fn,
                  std::size_t work_per_item = 1) {
    parallel_for_ranges(
        begin, end,
        [&fn](std::size_t lo, std::size_t hi) {
            for (std::size_t i = lo; i < hi; ++i) fn(i);
        },
        work_per_item);
}

inline constexpr std::size_t kReduceBlock = 4096;

/// Sum of term(i) over [0, n) with a worker-count-independent summation
/// order: fixed 4096-element blocks summed left to right, block sums
/// combined sequentially.
template <typename Term>
double block_reduce_sum(std::size_t n, Term&& term) {
    if (n == 0) return 0.0;
    const std::size_t blocks = (n + kReduceBlock - 1) / kReduceBlock;
    std::vector<double> partial(blocks, 0.0);
    parallel_for(0, blocks, [&](std::size_t b) {
        const std::size_t lo = b * kReduceBlock;
        const std::size_t hi = std::min(n, lo + kReduceBlock);
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += term(i);
        partial[b] = s;
    });
    double total = 0.0;
    for (double s : partial) total += s;
    return total;
}

/// Max of term(i) over [0, n); order-independent.
template <typename Term>
double block_reduce_max(std::size_t n, Term&& term) {
    if (n == 0) return 0.0;
    const std::size_t blocks = (n + kReduceBlock - 1) / kReduceBlock;
    std::vector<double> partial(blocks, 0.0);
    parallel_for(0, blocks, [&](std::size_t b) {
        const std::size_t lo = b * kReduceBlock;
        const std::size_t hi = std::min(n, lo + kReduceBlock);
        double m = 0.0;
        for (std::size_t i = lo; i < hi; ++i) m = std::max(m, term(i));
        partial[b] = m;
    });
    double total = 0.0;
    for (double m : partial) total = std::max(total, m);
    return total;
}

}  // namespace helmns::par

#endif  // HELMNS_PARALLEL_HPP
