#pragma once

#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <mutex>
#include <string>
#include <vector>

#include "manetlab/medium.hpp"

namespace manetlab::control {

// Broadcast of the trace as newline-delimited JSON. Every event is kept, so a
// reader can start from any sequence number; a follower that falls more than
// kMaxLag events behind the head is cut off.
class EventHub {
public:
    static constexpr std::size_t kMaxLag = 4096;

    void publish(const TraceEvent& e);
    std::size_t size() const;

    struct Batch {
        std::vector<std::string> lines;
        std::size_t next = 0;   // sequence number after the last line
        bool lagging = false;   // reader is more than kMaxLag behind
        bool closed = false;
    };
    // Lines [from, from + max). Waits up to `wait` when nothing is available.
    Batch read(std::size_t from, std::size_t max, std::chrono::milliseconds wait) const;

    // Wakes every waiting reader; later reads return closed.
    void close();

private:
    mutable std::mutex mu_;
    mutable std::condition_variable cv_;
    std::vector<std::string> lines_;
    bool closed_ = false;
};

}  // namespace manetlab::control
