#include "manetlab/control/command_queue.hpp"

namespace manetlab::control {

CommandQueue::CommandQueue() : worker_([this] { work(); }) {}

CommandQueue::~CommandQueue() {
    {
        std::lock_guard lock(mu_);
        stopping_ = true;
    }
    cv_.notify_all();
    worker_.join();
}

std::uint64_t CommandQueue::next_id() const {
    std::lock_guard lock(mu_);
    return next_id_;
}

std::uint64_t CommandQueue::executed() const {
    std::lock_guard lock(mu_);
    return executed_;
}

void CommandQueue::enqueue(std::function<void()> run) {
    {
        std::lock_guard lock(mu_);
        pending_.push_back({next_id_++, std::move(run), std::chrono::system_clock::now()});
    }
    cv_.notify_one();
}

void CommandQueue::work() {
    for (;;) {
        Command cmd;
        {
            std::unique_lock lock(mu_);
            cv_.wait(lock, [this] { return stopping_ || !pending_.empty(); });
            // Drain what is queued even when stopping, so no future is left dangling.
            if (pending_.empty()) return;
            cmd = std::move(pending_.front());
            pending_.pop_front();
        }
        cmd.run();
        std::lock_guard lock(mu_);
        ++executed_;
    }
}

}  // namespace manetlab::control
