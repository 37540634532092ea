/*
   Copyright 2026 The dysonqsd Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace dysonqsd {

/// Fixed set of worker threads reused across parallel_for calls. Work items
/// are indices; callers write results into per-index slots, so the outcome
/// never depends on the number of workers.
class WorkerPool {
public:
    explicit WorkerPool(std::size_t workers = 1) : workers_(std::max<std::size_t>(1, workers))
    {
        for (std::size_t w = 1; w < workers_; ++w) {
            threads_.emplace_back([this, w] { worker_loop(w); });
        }
    }

    WorkerPool(const WorkerPool&) = delete;
    WorkerPool& operator=(const WorkerPool&) = delete;

    ~WorkerPool()
    {
        {
            std::lock_guard lock(mutex_);
            stopping_ = true;
        }
        wake_.notify_all();
        for (auto& t : threads_) {
            t.join();
        }
    }

    std::size_t size() const { return workers_; }

    /// Calls fn(i) for every i in [0, n). If any call throws, the exception
    /// from the smallest failing index is rethrown after all workers finish.
    void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn)
    {
        parallel_for_worker(n, [&fn](std::size_t i, std::size_t) { fn(i); });
    }

    /// As parallel_for, but fn(i, worker) also receives the id (< size()) of
    /// the worker running it, for per-worker scratch state.
    void parallel_for_worker(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn)
    {
        if (n == 0) {
            return;
        }
        if (workers_ == 1 || n == 1) {
            for (std::size_t i = 0; i < n; ++i) {
                fn(i, 0);
            }
            return;
        }
        {
            std::lock_guard lock(mutex_);
            task_ = &fn;
            task_size_ = n;
            chunk_ = std::max<std::size_t>(1, n / (workers_ * 8));
            next_.store(0);
            active_ = threads_.size();
            error_index_ = n;
            error_ = nullptr;
            ++generation_;
        }
        wake_.notify_all();
        run_chunks(0);
        std::unique_lock lock(mutex_);
        done_.wait(lock, [this] { return active_ == 0; });
        task_ = nullptr;
        if (error_) {
            std::rethrow_exception(error_);
        }
    }

private:
    void run_chunks(std::size_t worker)
    {
        for (;;) {
            const std::size_t begin = next_.fetch_add(chunk_);
            if (begin >= task_size_) {
                return;
            }
            const std::size_t end = std::min(task_size_, begin + chunk_);
            for (std::size_t i = begin; i < end; ++i) {
                try {
                    (*task_)(i, worker);
                }
                catch (...) {
                    std::lock_guard lock(mutex_);
                    if (i < error_index_) {
                        error_index_ = i;
                        error_ = std::current_exception();
                    }
                }
            }
        }
    }

    void worker_loop(std::size_t worker)
    {
        std::size_t seen = 0;
        for (;;) {
            {
                std::unique_lock lock(mutex_);
                wake_.wait(lock, [&] { return stopping_ || generation_ != seen; });
                if (stopping_) {
                    return;
                }
                seen = generation_;
            }
            run_chunks(worker);
            {
                std::lock_guard lock(mutex_);
                --active_;
            }
            done_.notify_one();
        }
    }

    std::size_t workers_;
    std::vector<std::thread> threads_;
    std::mutex mutex_;
    std::condition_variable wake_;
    std::condition_variable done_;
    const std::function<void(std::size_t, std::size_t)>* task_ = nullptr;
    std::size_t task_size_ = 0;
    std::size_t chunk_ = 1;
    std::atomic<std::size_t> next_{0};
    std::size_t active_ = 0;
    std::size_t generation_ = 0;
    std::size_t error_index_ = 0;
    std::exception_ptr error_;
    bool stopping_ = false;
};

}  // namespace dysonqsd
