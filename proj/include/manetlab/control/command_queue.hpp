#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <functional>
#include <future>
#include <memory>
#include <mutex>
#include <thread>
#include <type_traits>

namespace manetlab::control {

// Runs submitted commands one at a time on a dedicated worker thread, in
// submission (id) order.
class CommandQueue {
public:
    CommandQueue();
    ~CommandQueue();

    CommandQueue(const CommandQueue&) = delete;
    CommandQueue& operator=(const CommandQueue&) = delete;

    template <class F>
    auto submit(F fn) -> std::future<std::invoke_result_t<F&>> {
        using R = std::invoke_result_t<F&>;
        auto task = std::make_shared<std::packaged_task<R()>>(std::move(fn));
        auto future = task->get_future();
        enqueue([task] { (*task)(); });
        return future;
    }

    // Ids handed out so far; the next command gets this value.
    std::uint64_t next_id() const;
    std::uint64_t executed() const;

private:
    struct Command {
        std::uint64_t id;
        std::function<void()> run;
        std::chrono::system_clock::time_point issued_at;
    };

    void enqueue(std::function<void()> run);
    void work();

    mutable std::mutex mu_;
    std::condition_variable cv_;
    std::deque<Command> pending_;
    std::uint64_t next_id_ = 1;
    std::uint64_t executed_ = 0;
    bool stopping_ = false;
    std::thread worker_;
};

}  // namespace manetlab::control
