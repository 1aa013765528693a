#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <memory>
#include <string>
#include <thread>

#include "manetlab/control/api.hpp"
#include "manetlab/control/controller.hpp"

namespace httplib {
class Server;
}

namespace manetlab::control {

struct ServiceConfig {
    std::string host = "127.0.0.1";
    int port = 8080;  // 0 picks a free port
    // Registry file; must exist when set. Empty starts with no nodes and no write-through.
    std::string registry_path;
    std::string backend = "simulated";  // simulated | remote
    int agent_port = 7001;
    std::string wireless_ifname = "ath0";
    TickPolicy tick = TickPolicy::Manual;
    std::chrono::milliseconds tick_period{100};  // realtime only
    // Optional. The attack file is loaded when present; the directory must exist.
    std::string attacks_path;
    std::string scenario_dir;
    int threads = 32;
};

// Validates the config and builds the testbed. Throws ConfigError.
std::unique_ptr<Testbed> make_testbed(const ServiceConfig& config);

// The HTTP front of an Api. GET /events?follow=1 streams NDJSON until the
// service stops; a follower more than EventHub::kMaxLag events behind gets a
// final {"error":"Lagging",...} line and is disconnected.
class Service {
public:
    // Throws ConfigError.
    explicit Service(ServiceConfig config);
    ~Service();

    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    // Binds and starts serving on a background thread. Throws BindError.
    void start();
    // Idempotent. Ends followers of /events, then the listener.
    void stop();
    bool running() const noexcept { return listener_.joinable() && !stopping_; }

    int port() const noexcept { return port_; }
    Api& api() noexcept { return *api_; }
    Controller& controller() noexcept { return *controller_; }

private:
    void install_routes();
    void run_ticker();

    ServiceConfig config_;
    std::unique_ptr<Controller> controller_;
    std::unique_ptr<Api> api_;
    std::unique_ptr<httplib::Server> server_;
    std::thread listener_;
    std::thread ticker_;
    std::atomic<bool> stopping_{false};
    int port_ = 0;
};

}  // namespace manetlab::control
