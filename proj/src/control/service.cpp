#include "manetlab/control/service.hpp"

#include <httplib.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "manetlab/control/json_codec.hpp"
#include "manetlab/control/remote_backend.hpp"

namespace manetlab::control {

namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::ConfigError, "cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Request to_request(const httplib::Request& req) {
    Request r;
    r.method = req.method;
    r.path = req.path;
    for (const auto& [k, v] : req.params) r.query.emplace(k, v);
    r.body = req.body;
    return r;
}

void write_response(const Response& in, httplib::Response& out) {
    out.status = in.status;
    out.set_content(in.body, in.content_type);
}

}  // namespace

std::unique_ptr<Testbed> make_testbed(const ServiceConfig& config) {
    if (config.port < 0 || config.port > 65535) {
        throw Error(Errc::ConfigError, "port out of range: " + std::to_string(config.port));
    }
    if (config.agent_port <= 0 || config.agent_port > 65535) {
        throw Error(Errc::ConfigError, "agent port out of range: " + std::to_string(config.agent_port));
    }
    if (config.tick_period.count() <= 0) throw Error(Errc::ConfigError, "tick period must be positive");

    std::unique_ptr<Backend> backend;
    if (config.backend == "simulated") {
        backend = std::make_unique<SimulatedBackend>(config.wireless_ifname);
    } else if (config.backend == "remote") {
        backend = std::make_unique<RemoteBackend>(config.agent_port, config.wireless_ifname);
    } else {
        throw Error(Errc::ConfigError, "unknown backend '" + config.backend + "' (simulated | remote)");
    }

    Registry registry;
    if (!config.registry_path.empty()) {
        if (!fs::is_regular_file(config.registry_path)) {
            throw Error(Errc::ConfigError, "registry file not found: " + config.registry_path);
        }
        try {
            registry = Registry::load(read_file(config.registry_path));
        } catch (const Error& e) {
            if (e.code() == Errc::ConfigError) throw;
            throw Error(Errc::ConfigError, config.registry_path + ": " + e.what());
        }
    }

    TestbedOptions options;
    options.wireless_ifname = config.wireless_ifname;
    auto bed = std::make_unique<Testbed>(std::move(registry), std::move(backend), options);

    try {
        if (!config.attacks_path.empty() && fs::exists(config.attacks_path)) {
            bed->load_attack_list(read_file(config.attacks_path));
        }
        if (!config.scenario_dir.empty()) {
            if (!fs::is_directory(config.scenario_dir)) {
                throw Error(Errc::ConfigError, "scenario directory not found: " + config.scenario_dir);
            }
            std::vector<fs::path> files;
            for (const auto& entry : fs::directory_iterator(config.scenario_dir)) {
                if (entry.is_regular_file() && entry.path().extension() == ".scn") files.push_back(entry.path());
            }
            std::sort(files.begin(), files.end());
            for (const auto& f : files) bed->load_scenario(read_file(f));
        }
    } catch (const Error& e) {
        if (e.code() == Errc::ConfigError) throw;
        throw Error(Errc::ConfigError, std::string("startup files: ") + e.what());
    }
    return bed;
}

Service::Service(ServiceConfig config) : config_(std::move(config)) {
    controller_ = std::make_unique<Controller>(make_testbed(config_));
    ApiOptions options;
    options.tick = config_.tick;
    options.registry_path = config_.registry_path;
    options.attacks_path = config_.attacks_path;
    options.scenario_dir = config_.scenario_dir;
    api_ = std::make_unique<Api>(*controller_, std::move(options));
    server_ = std::make_unique<httplib::Server>();
    // httplib's default adds SO_REUSEPORT, which would let a second instance share the port.
    server_->set_socket_options([](socket_t sock) {
        int yes = 1;
        setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes), sizeof(yes));
    });
    const int threads = std::max(config_.threads, 2);
    server_->new_task_queue = [threads] { return new httplib::ThreadPool(static_cast<std::size_t>(threads)); };
    install_routes();
}

Service::~Service() { stop(); }

void Service::install_routes() {
    auto plain = [this](const httplib::Request& req, httplib::Response& res) {
        write_response(api_->handle(to_request(req)), res);
    };
    server_->Post(".*", plain);
    server_->Put(".*", plain);
    server_->Delete(".*", plain);
    server_->Patch(".*", plain);
    server_->Get(".*", [this, plain](const httplib::Request& req, httplib::Response& res) {
        if (req.path != "/events" || req.get_param_value("follow") != "1") {
            plain(req, res);
            return;
        }
        EventHub& hub = controller_->events();
        std::size_t cursor = hub.size();
        if (req.has_param("since")) {
            Request r = to_request(req);
            r.query.erase("follow");
            // Validates `since` the same way the snapshot does.
            Response check = api_->handle(r);
            if (check.status != 200) {
                write_response(check, res);
                return;
            }
            cursor = static_cast<std::size_t>(std::stoull(req.get_param_value("since")));
        }
        auto state = std::make_shared<std::size_t>(cursor);
        res.set_chunked_content_provider(
            "application/x-ndjson", [this, &hub, state](std::size_t, httplib::DataSink& sink) {
                if (stopping_) {
                    sink.done();
                    return true;
                }
                auto batch = hub.read(*state, 256, std::chrono::milliseconds(200));
                if (batch.lagging) {
                    auto line = dump(Json{{"error", "Lagging"},
                                          {"message", "more than " + std::to_string(EventHub::kMaxLag) +
                                                          " events behind; reconnect with since=" +
                                                          std::to_string(hub.size())}});
                    sink.write(line.data(), line.size());
                    sink.done();
                    return true;
                }
                for (const auto& line : batch.lines) {
                    if (!sink.write(line.data(), line.size())) return false;
                }
                *state = batch.next;
                if (batch.closed && batch.lines.empty()) sink.done();
                return true;
            });
    });
}

void Service::start() {
    if (config_.port == 0) {
        port_ = server_->bind_to_any_port(config_.host);
        if (port_ < 0) throw Error(Errc::BindError, "cannot bind " + config_.host + " on any port");
    } else {
        if (!server_->bind_to_port(config_.host, config_.port)) {
            throw Error(Errc::BindError, "cannot bind " + config_.host + ":" + std::to_string(config_.port));
        }
        port_ = config_.port;
    }
    listener_ = std::thread([this] { server_->listen_after_bind(); });
    server_->wait_until_ready();
    if (config_.tick == TickPolicy::Realtime) ticker_ = std::thread([this] { run_ticker(); });
}

void Service::run_ticker() {
    using clock = std::chrono::steady_clock;
    auto last = clock::now();
    while (!stopping_) {
        std::this_thread::sleep_for(config_.tick_period);
        auto now = clock::now();
        auto elapsed = std::chrono::duration_cast<std::chrono::microseconds>(now - last).count();
        last = now;
        try {
            controller_->write([&](Testbed& bed) { return bed.tick(static_cast<VirtualTime>(elapsed)); });
        } catch (const Error&) {
            // Busy: the clock stands still while a remote command runs.
        }
    }
}

void Service::stop() {
    if (stopping_.exchange(true)) return;
    if (ticker_.joinable()) ticker_.join();
    controller_->events().close();
    if (listener_.joinable()) {
        server_->stop();
        listener_.join();
    }
}

}  // namespace manetlab::control
