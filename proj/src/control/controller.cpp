#include "manetlab/control/controller.hpp"

#include <exception>

namespace manetlab::control {

Controller::Controller(std::unique_ptr<Testbed> bed) : bed_(std::move(bed)) {
    for (const auto& e : bed_->medium().trace()) hub_.publish(e);
    bed_->medium().subscribe([this](const TraceEvent& e) { hub_.publish(e); });
}

Controller::~Controller() { hub_.close(); }

ExecResult Controller::exec(const std::string& node, const std::string& command) {
    auto lease = write([&](Testbed& bed) {
        auto held = std::make_shared<Testbed::ExecLease>(bed.begin_exec(node));
        exec_active_ = true;
        return held;
    });
    ExecResult result;
    std::exception_ptr failure;
    try {
        result = lease->run(command);
    } catch (...) {
        failure = std::current_exception();
    }
    exclusive([&](Testbed&) {
        lease.reset();
        exec_active_ = false;
        return 0;
    });
    if (failure) std::rethrow_exception(failure);
    return result;
}

}  // namespace manetlab::control
