#pragma once

#include <atomic>
#include <memory>
#include <shared_mutex>
#include <string>
#include <utility>

#include "manetlab/control/command_queue.hpp"
#include "manetlab/control/event_hub.hpp"
#include "manetlab/error.hpp"
#include "manetlab/testbed.hpp"

namespace manetlab::control {

// Owns the testbed and serialises access to it. Reads run concurrently under
// a shared lock; every mutation goes through the single-writer queue. While a
// remote command runs, new mutations are refused with Busy at submission.
class Controller {
public:
    explicit Controller(std::unique_ptr<Testbed> bed);
    ~Controller();

    Controller(const Controller&) = delete;
    Controller& operator=(const Controller&) = delete;

    template <class F>
    auto read(F&& fn) const {
        std::shared_lock lock(mu_);
        return fn(std::as_const(*bed_));
    }

    template <class F>
    auto write(F fn) {
        if (exec_active_.load()) {
            throw Error(Errc::Busy, "a remote command is executing; no other fixture is available");
        }
        return exclusive(std::move(fn));
    }

    // begin_exec + run + release. The command itself runs outside the writer
    // so that concurrent mutations see Busy instead of queueing behind it.
    ExecResult exec(const std::string& node, const std::string& command);
    bool exec_active() const noexcept { return exec_active_.load(); }

    EventHub& events() noexcept { return hub_; }
    const EventHub& events() const noexcept { return hub_; }
    std::uint64_t commands_executed() const { return queue_.executed(); }

private:
    template <class F>
    auto exclusive(F fn) {
        auto future = queue_.submit([this, fn = std::move(fn)]() mutable {
            std::unique_lock lock(mu_);
            return fn(*bed_);
        });
        return future.get();
    }

    std::unique_ptr<Testbed> bed_;
    EventHub hub_;
    mutable std::shared_mutex mu_;
    std::atomic<bool> exec_active_{false};
    CommandQueue queue_;  // last: its worker stops before the rest goes away
};

}  // namespace manetlab::control
