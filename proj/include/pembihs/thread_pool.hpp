#pragma once

#include <condition_variable>
#include <cstddef>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace pembihs {

// Fixed pool of workers driven stage by stage: parallel_for blocks the caller
// until every worker has finished its slice, which is the barrier between
// engine stages. With one worker everything runs inline on the caller.
class ThreadPool {
public:
    explicit ThreadPool(int workers);
    ~ThreadPool();

    ThreadPool(const ThreadPool&) = delete;
    ThreadPool& operator=(const ThreadPool&) = delete;

    int workers() const { return workers_; }

    // Splits [0, total) into one contiguous chunk per worker and runs
    // fn(worker_index, begin, end) on each. Exceptions from workers are
    // rethrown on the caller (first one wins).
    void parallel_for(std::size_t total, const std::function<void(int, std::size_t, std::size_t)>& fn);

    // Runs fn(worker_index) on every worker.
    void run_on_all(const std::function<void(int)>& fn);

private:
    void worker_loop(int index);

    int workers_;
    std::vector<std::thread> threads_;
    std::mutex mutex_;
    std::condition_variable start_cv_;
    std::condition_variable done_cv_;
    std::function<void(int)> job_;
    std::uint64_t generation_ = 0;
    int pending_ = 0;
    bool stop_ = false;
    std::exception_ptr error_;
};

}  // namespace pembihs
