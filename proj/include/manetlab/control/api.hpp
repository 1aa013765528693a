#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "manetlab/control/controller.hpp"
#include "manetlab/error.hpp"

namespace manetlab::control {

enum class TickPolicy { Manual, Realtime };

std::string_view to_string(TickPolicy policy);

struct Request {
    std::string method;
    std::string path;
    std::map<std::string, std::string> query;
    std::string body;
};

struct Response {
    int status = 200;
    std::string content_type = "application/json";
    std::string body;
};

struct ApiOptions {
    TickPolicy tick = TickPolicy::Manual;
    // Write-through files; empty disables.
    std::string registry_path;
    std::string attacks_path;
    std::string scenario_dir;
};

// HTTP status used for each error code.
int http_status(Errc code);

// Request router over a Controller. Knows nothing about sockets, so the whole
// surface can be exercised in-process. Streaming (/events?follow=1) is the
// transport's business; here /events returns what is available now.
class Api {
public:
    Api(Controller& controller, ApiOptions options)
        : controller_(controller), options_(std::move(options)) {}

    Response handle(const Request& request);

    const ApiOptions& options() const noexcept { return options_; }
    Controller& controller() noexcept { return controller_; }

private:
    Response route(const Request& request, const std::vector<std::string>& seg);

    Response nodes(const Request& request, const std::vector<std::string>& seg);
    Response scenarios(const Request& request, const std::vector<std::string>& seg);
    Response attacks(const Request& request, const std::vector<std::string>& seg);
    Response flows(const Request& request, const std::vector<std::string>& seg);
    Response events(const Request& request);
    Response tick(const Request& request);
    Response health();

    void persist_registry(const Testbed& bed) const;
    void persist_attacks(const Testbed& bed) const;
    void persist_scenario(const Testbed& bed, std::string_view name) const;

    Controller& controller_;
    ApiOptions options_;
};

}  // namespace manetlab::control
