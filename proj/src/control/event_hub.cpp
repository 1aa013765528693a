#include "manetlab/control/event_hub.hpp"

#include <algorithm>

#include "manetlab/control/json_codec.hpp"

namespace manetlab::control {

void EventHub::publish(const TraceEvent& e) {
    {
        std::lock_guard lock(mu_);
        lines_.push_back(dump(event_json(lines_.size(), e)));
    }
    cv_.notify_all();
}

std::size_t EventHub::size() const {
    std::lock_guard lock(mu_);
    return lines_.size();
}

EventHub::Batch EventHub::read(std::size_t from, std::size_t max,
                               std::chrono::milliseconds wait) const {
    std::unique_lock lock(mu_);
    if (from >= lines_.size() && !closed_ && wait.count() > 0) {
        cv_.wait_for(lock, wait, [&] { return closed_ || from < lines_.size(); });
    }
    Batch batch;
    batch.closed = closed_;
    if (from < lines_.size() && lines_.size() - from > kMaxLag) batch.lagging = true;
    const std::size_t end = from < lines_.size() ? from + std::min(max, lines_.size() - from) : from;
    for (std::size_t i = from; i < end; ++i) batch.lines.push_back(lines_[i]);
    batch.next = std::max(from, end);
    return batch;
}

void EventHub::close() {
    {
        std::lock_guard lock(mu_);
        closed_ = true;
    }
    cv_.notify_all();
}

}  // namespace manetlab::control
