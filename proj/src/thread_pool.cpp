#include "pembihs/thread_pool.hpp"

#include <algorithm>

#include "pembihs/common.hpp"

namespace pembihs {

ThreadPool::ThreadPool(int workers) : workers_(workers) {
    if (workers < 1) throw InputError("worker count must be at least 1");
    threads_.reserve(static_cast<std::size_t>(workers - 1));
    for (int i = 1; i < workers; ++i) threads_.emplace_back([this, i] { worker_loop(i); });
}

ThreadPool::~ThreadPool() {
    {
        std::lock_guard lock(mutex_);
        stop_ = true;
    }
    start_cv_.notify_all();
    for (auto& t : threads_) t.join();
}

void ThreadPool::worker_loop(int index) {
    std::uint64_t seen = 0;
    while (true) {
        std::function<void(int)> job;
        {
            std::unique_lock lock(mutex_);
            start_cv_.wait(lock, [&] { return stop_ || generation_ != seen; });
            if (stop_) return;
            seen = generation_;
            job = job_;
        }
        try {
            job(index);
        } catch (...) {
            std::lock_guard lock(mutex_);
            if (!error_) error_ = std::current_exception();
        }
        {
            std::lock_guard lock(mutex_);
            if (--pending_ == 0) done_cv_.notify_all();
        }
    }
}

void ThreadPool::run_on_all(const std::function<void(int)>& fn) {
    if (workers_ == 1) {
        fn(0);
        return;
    }
    {
        std::lock_guard lock(mutex_);
        job_ = fn;
        pending_ = workers_ - 1;
        error_ = nullptr;
        ++generation_;
    }
    start_cv_.notify_all();
    std::exception_ptr caller_error;
    try {
        fn(0);
    } catch (...) {
        caller_error = std::current_exception();
    }
    {
        std::unique_lock lock(mutex_);
        done_cv_.wait(lock, [&] { return pending_ == 0; });
        if (!caller_error && error_) caller_error = error_;
    }
    if (caller_error) std::rethrow_exception(caller_error);
}

void ThreadPool::parallel_for(std::size_t total,
                              const std::function<void(int, std::size_t, std::size_t)>& fn) {
    if (total == 0) return;
    const std::size_t per = (total + static_cast<std::size_t>(workers_) - 1) /
                            static_cast<std::size_t>(workers_);
    run_on_all([&](int w) {
        const std::size_t begin = std::min(total, per * static_cast<std::size_t>(w));
        const std::size_t end = std::min(total, begin + per);
        if (begin < end) fn(w, begin, end);
    });
}

}  // namespace pembihs
