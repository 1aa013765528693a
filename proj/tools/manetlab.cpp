// manetlab: run the control service, or talk to one.
//
// Client subcommands print the server's response body unchanged on stdout and
// exit 0 on a 2xx status, 1 on any other status, 2 when the server cannot be
// reached or the arguments are wrong.

#include <CLI11.hpp>
#include <httplib.h>

#include <csignal>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include "manetlab/control/json_codec.hpp"
#include "manetlab/control/service.hpp"

using manetlab::control::Json;

namespace {

volatile std::sig_atomic_t g_stop = 0;

void on_signal(int) { g_stop = 1; }

struct Call {
    std::string method;
    std::string path;
    std::optional<Json> body;
};

int perform(const std::string& server, const Call& call) {
    httplib::Client cli(server);
    cli.set_connection_timeout(std::chrono::seconds(5));
    cli.set_read_timeout(std::chrono::seconds(120));
    const std::string body = call.body ? call.body->dump() : "";
    const char* type = "application/json";
    httplib::Result res;
    if (call.method == "GET") {
        res = cli.Get(call.path);
    } else if (call.method == "POST") {
        res = cli.Post(call.path, body, type);
    } else {
        res = cli.Delete(call.path, body, type);
    }
    if (!res) {
        std::cerr << "manetlab: cannot reach " << server << ": " << httplib::to_string(res.error()) << "\n";
        return 2;
    }
    std::cout << res->body << std::flush;
    return res->status >= 200 && res->status < 300 ? 0 : 1;
}

int follow(const std::string& server, const std::string& path) {
    httplib::Client cli(server);
    cli.set_read_timeout(std::chrono::hours(24));
    int status = 0;
    auto res = cli.Get(
        path,
        [&](const httplib::Response& r) {
            status = r.status;
            return true;
        },
        [&](const char* data, std::size_t len) {
            std::cout.write(data, static_cast<std::streamsize>(len));
            std::cout.flush();
            return g_stop == 0;
        });
    if (!res && res.error() != httplib::Error::Canceled) {
        std::cerr << "manetlab: cannot reach " << server << ": " << httplib::to_string(res.error()) << "\n";
        return 2;
    }
    return status >= 200 && status < 300 ? 0 : 1;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CLI::ValidationError("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Optional CLI values become JSON keys only when given.
template <class T>
void put(Json& j, const char* key, const std::optional<T>& v) {
    if (v) j[key] = *v;
}

int serve(const manetlab::control::ServiceConfig& config) {
    try {
        manetlab::control::Service svc(config);
        svc.start();
        std::signal(SIGINT, on_signal);
        std::signal(SIGTERM, on_signal);
        std::cout << "listening on " << config.host << ":" << svc.port() << std::endl;
        while (g_stop == 0) std::this_thread::sleep_for(std::chrono::milliseconds(100));
        svc.stop();
        return 0;
    } catch (const manetlab::Error& e) {
        std::cerr << "manetlab: " << manetlab::to_string(e.code()) << ": " << e.what() << "\n";
        return 2;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"MANET emulation testbed: control service and client"};
    app.require_subcommand(1);
    std::string server = "http://127.0.0.1:8080";
    app.add_option("--server", server, "control service base URL")->capture_default_str();

    Call call;
    auto request = [&call](std::string method, std::string path, std::optional<Json> body = std::nullopt) {
        call = Call{std::move(method), std::move(path), std::move(body)};
    };

    // serve
    manetlab::control::ServiceConfig config;
    std::string tick = "manual";
    int tick_ms = 100;
    auto* serve_cmd = app.add_subcommand("serve", "run the control service");
    serve_cmd->add_option("--host", config.host)->capture_default_str();
    serve_cmd->add_option("--port", config.port, "0 picks a free port")->capture_default_str();
    serve_cmd->add_option("--registry", config.registry_path, "node registry file (must exist)");
    serve_cmd->add_option("--backend", config.backend)->check(CLI::IsMember({"simulated", "remote"}))
        ->capture_default_str();
    serve_cmd->add_option("--agent-port", config.agent_port, "member node agent port (remote backend)")
        ->capture_default_str();
    serve_cmd->add_option("--ifname", config.wireless_ifname, "wireless interface in emitted rules")
        ->capture_default_str();
    serve_cmd->add_option("--tick", tick)->check(CLI::IsMember({"manual", "realtime"}))->capture_default_str();
    serve_cmd->add_option("--tick-period-ms", tick_ms, "realtime clock granularity")->capture_default_str();
    serve_cmd->add_option("--attacks", config.attacks_path, "saved attack list file");
    serve_cmd->add_option("--scenarios", config.scenario_dir, "directory of .scn files");

    app.add_subcommand("health", "service status")->callback([&] { request("GET", "/health"); });

    // nodes
    auto* nodes = app.add_subcommand("nodes", "node registry");
    nodes->require_subcommand(1);
    nodes->add_subcommand("list", "list nodes")->callback([&] { request("GET", "/nodes"); });
    {
        auto* add = nodes->add_subcommand("add", "register a node");
        auto fields = std::make_shared<std::array<std::string, 5>>();
        const char* opts[] = {"--name", "--wired-ip", "--wired-mac", "--wireless-ip", "--wireless-mac"};
        for (std::size_t i = 0; i < 5; ++i) add->add_option(opts[i], (*fields)[i])->required();
        add->callback([&, fields] {
            Json j;
            for (std::size_t i = 0; i < 5; ++i) j[std::string(manetlab::control::kNodeKeys[i])] = (*fields)[i];
            request("POST", "/nodes", j);
        });
    }
    {
        auto name = std::make_shared<std::string>();
        auto* rm = nodes->add_subcommand("remove", "remove a node");
        rm->add_option("name", *name)->required();
        rm->callback([&, name] { request("DELETE", "/nodes/" + *name); });
        auto* show = nodes->add_subcommand("show", "one node");
        show->add_option("name", *name)->required();
        show->callback([&, name] { request("GET", "/nodes/" + *name); });
    }

    // scenarios
    auto* scenario = app.add_subcommand("scenario", "topology scenarios");
    scenario->require_subcommand(1);
    {
        struct Build {
            std::string name;
            std::uint64_t nodes = 0, topologies = 0, density = 0, maxdeg = 0;
            std::optional<std::uint64_t> seed, interval, max_attempts;
        };
        auto b = std::make_shared<Build>();
        auto* build = scenario->add_subcommand("build", "generate a scenario");
        build->add_option("--name", b->name)->required();
        build->add_option("--nodes", b->nodes)->required();
        build->add_option("--topologies", b->topologies)->required();
        build->add_option("--density", b->density, "percent")->required();
        build->add_option("--maxdeg", b->maxdeg)->required();
        build->add_option("--seed", b->seed);
        build->add_option("--interval", b->interval, "replay interval in seconds");
        build->add_option("--max-attempts", b->max_attempts);
        build->callback([&, b] {
            Json j{{"name", b->name}, {"nodes", b->nodes}, {"topologies", b->topologies},
                   {"density", b->density}, {"maxdeg", b->maxdeg}};
            put(j, "seed", b->seed);
            put(j, "interval", b->interval);
            put(j, "max_attempts", b->max_attempts);
            request("POST", "/scenarios", j);
        });
    }
    scenario->add_subcommand("list", "all scenarios")->callback([&] { request("GET", "/scenarios"); });
    {
        auto name = std::make_shared<std::string>();
        auto seq = std::make_shared<std::uint64_t>(0);
        auto force = std::make_shared<bool>(false);
        auto from = std::make_shared<std::uint64_t>(0);
        auto to = std::make_shared<std::uint64_t>(0);
        auto file = std::make_shared<std::string>();

        auto* show = scenario->add_subcommand("show", "one scenario");
        show->add_option("name", *name)->required();
        show->callback([&, name] { request("GET", "/scenarios/" + *name); });

        auto* saved = scenario->add_subcommand("file", "the scenario file");
        saved->add_option("name", *name)->required();
        saved->callback([&, name] { request("GET", "/scenarios/" + *name + "/file"); });

        auto* import = scenario->add_subcommand("import", "upload a scenario file");
        import->add_option("file", *file)->required()->check(CLI::ExistingFile);
        import->callback([&, file] { request("POST", "/scenarios/import", Json{{"file", slurp(*file)}}); });

        auto* dot = scenario->add_subcommand("dot", "one topology as DOT");
        dot->add_option("name", *name)->required();
        dot->add_option("seq", *seq)->required();
        dot->callback([&, name, seq] {
            request("GET", "/scenarios/" + *name + "/topologies/" + std::to_string(*seq) + ".dot");
        });

        auto* apply = scenario->add_subcommand("apply", "apply one topology");
        apply->add_option("name", *name)->required();
        apply->add_option("seq", *seq)->required();
        apply->add_flag("--force", *force, "apply even when rejected");
        apply->callback([&, name, seq, force] {
            std::optional<Json> body;
            if (*force) body = Json{{"force", true}};
            request("POST", "/scenarios/" + *name + "/apply/" + std::to_string(*seq), body);
        });

        auto* play = scenario->add_subcommand("play", "replay a range on the interval");
        play->add_option("name", *name)->required();
        play->add_option("--from", *from)->required();
        play->add_option("--to", *to)->required();
        play->callback([&, name, from, to] {
            request("POST", "/scenarios/" + *name + "/play", Json{{"from", *from}, {"to", *to}});
        });

        auto* stop = scenario->add_subcommand("stop", "cancel playback");
        stop->add_option("name", *name)->required();
        stop->callback([&, name] { request("DELETE", "/scenarios/" + *name + "/play"); });
    }

    // attacks
    auto* attack = app.add_subcommand("attack", "adversary");
    attack->require_subcommand(1);
    {
        struct Spec {
            std::string name, target;
            std::optional<std::string> protocol, kind;
            std::optional<std::uint64_t> loss_s, normal_s, cycles;
        };
        auto s = std::make_shared<Spec>();
        auto to_body = [s] {
            Json j{{"name", s->name}, {"target", s->target}};
            put(j, "protocol", s->protocol);
            put(j, "kind", s->kind);
            put(j, "loss_s", s->loss_s);
            put(j, "normal_s", s->normal_s);
            put(j, "cycles", s->cycles);
            return j;
        };
        auto add_spec = [s](CLI::App* cmd) {
            cmd->add_option("--name", s->name)->required();
            cmd->add_option("--target", s->target)->required();
            cmd->add_option("--protocol", s->protocol, "tcp | udp | icmp | all");
            cmd->add_option("--kind", s->kind,
                            "block-incoming | block-outgoing | block-both | periodic-loss | random-loss");
            cmd->add_option("--loss-s", s->loss_s);
            cmd->add_option("--normal-s", s->normal_s);
            cmd->add_option("--cycles", s->cycles);
        };
        auto* launch = attack->add_subcommand("launch", "launch an attack");
        add_spec(launch);
        launch->callback([&, to_body] { request("POST", "/attacks", to_body()); });
        auto* save = attack->add_subcommand("save", "add to the saved attack list");
        add_spec(save);
        save->callback([&, to_body] { request("POST", "/attacks/saved", to_body()); });
    }
    attack->add_subcommand("list", "active and saved attacks")->callback([&] { request("GET", "/attacks"); });
    attack->add_subcommand("saved", "the saved attack list")->callback([&] { request("GET", "/attacks/saved"); });
    {
        auto id = std::make_shared<std::uint64_t>(0);
        auto name = std::make_shared<std::string>();
        auto file = std::make_shared<std::string>();
        auto* show = attack->add_subcommand("show", "one active attack");
        show->add_option("id", *id)->required();
        show->callback([&, id] { request("GET", "/attacks/" + std::to_string(*id)); });
        auto* stop = attack->add_subcommand("stop", "stop an attack");
        stop->add_option("id", *id)->required();
        stop->callback([&, id] { request("DELETE", "/attacks/" + std::to_string(*id)); });
        auto* replay = attack->add_subcommand("replay", "launch a saved attack");
        replay->add_option("name", *name)->required();
        replay->callback([&, name] { request("POST", "/attacks/saved/" + *name + "/replay"); });
        auto* import = attack->add_subcommand("import", "replace the saved list from a file");
        import->add_option("file", *file)->required()->check(CLI::ExistingFile);
        import->callback([&, file] { request("POST", "/attacks/saved/import", Json{{"file", slurp(*file)}}); });
    }

    // inject
    {
        auto hex = std::make_shared<std::string>();
        auto as = std::make_shared<std::string>();
        auto* inject = app.add_subcommand("inject", "put a raw frame on the medium");
        inject->add_option("--hex", *hex)->required();
        inject->add_option("--as", *as, "node the frame is sent as")->required();
        inject->callback([&, hex, as] { request("POST", "/inject", Json{{"hex", *hex}, {"as_node", *as}}); });
    }

    // flows
    auto* flow = app.add_subcommand("flow", "traffic generator");
    flow->require_subcommand(1);
    {
        struct Spec {
            std::string src, dst;
            std::optional<std::string> protocol;
            std::optional<std::uint64_t> port, delay_ms, payload_len, count;
        };
        auto s = std::make_shared<Spec>();
        auto* start = flow->add_subcommand("start", "start a flow");
        start->add_option("--src", s->src)->required();
        start->add_option("--dst", s->dst)->required();
        start->add_option("--protocol", s->protocol, "tcp | udp | icmp");
        start->add_option("--port", s->port);
        start->add_option("--delay-ms", s->delay_ms);
        start->add_option("--payload-len", s->payload_len);
        start->add_option("--count", s->count, "packets; unbounded when omitted");
        start->callback([&, s] {
            Json j{{"src", s->src}, {"dst", s->dst}};
            put(j, "protocol", s->protocol);
            put(j, "port", s->port);
            put(j, "delay_ms", s->delay_ms);
            put(j, "payload_len", s->payload_len);
            put(j, "count", s->count);
            request("POST", "/flows", j);
        });
    }
    flow->add_subcommand("list", "all flows")->callback([&] { request("GET", "/flows"); });
    {
        auto id = std::make_shared<std::uint64_t>(0);
        auto* show = flow->add_subcommand("show", "one flow");
        show->add_option("id", *id)->required();
        show->callback([&, id] { request("GET", "/flows/" + std::to_string(*id)); });
        auto* stop = flow->add_subcommand("stop", "stop a flow");
        stop->add_option("id", *id)->required();
        stop->callback([&, id] { request("DELETE", "/flows/" + std::to_string(*id)); });
    }

    // probe
    {
        auto src = std::make_shared<std::string>();
        auto dst = std::make_shared<std::string>();
        auto count = std::make_shared<std::optional<std::uint64_t>>();
        auto timeout = std::make_shared<std::optional<std::uint64_t>>();
        auto* ping = app.add_subcommand("ping", "ping-style connectivity check");
        ping->add_option("src", *src)->required();
        ping->add_option("dst", *dst)->required();
        ping->add_option("-c,--count", *count);
        ping->add_option("--timeout-ms", *timeout);
        ping->callback([&, src, dst, count, timeout] {
            Json j{{"src", *src}, {"dst", *dst}};
            put(j, "count", *count);
            put(j, "timeout_ms", *timeout);
            request("POST", "/probe/ping", j);
        });
    }
    {
        auto node = std::make_shared<std::string>();
        auto words = std::make_shared<std::vector<std::string>>();
        auto* exec = app.add_subcommand("exec", "run a command on a node (exclusive)");
        exec->add_option("node", *node)->required();
        exec->add_option("command", *words)->required();
        exec->callback([&, node, words] {
            std::string command;
            for (const auto& w : *words) command += (command.empty() ? "" : " ") + w;
            request("POST", "/exec", Json{{"node", *node}, {"command", command}});
        });
    }

    app.add_subcommand("topology", "the applied topology as DOT")->callback([&] {
        request("GET", "/topology/current.dot");
    });

    bool follow_events = false;
    std::optional<std::uint64_t> since;
    auto* events = app.add_subcommand("events", "the event stream as NDJSON");
    events->add_option("--since", since, "first sequence number");
    events->add_flag("-f,--follow", follow_events, "keep streaming");
    events->callback([&] {
        std::string path = "/events";
        std::string sep = "?";
        if (follow_events) {
            path += "?follow=1";
            sep = "&";
        }
        if (since) path += sep + "since=" + std::to_string(*since);
        request("GET", path);
    });

    auto us = std::make_shared<std::optional<std::uint64_t>>();
    auto ms = std::make_shared<std::optional<std::uint64_t>>();
    auto seconds = std::make_shared<std::optional<std::uint64_t>>();
    auto* tick_cmd = app.add_subcommand("tick", "advance the virtual clock (manual tick policy)");
    auto* o_us = tick_cmd->add_option("--us", *us);
    auto* o_ms = tick_cmd->add_option("--ms", *ms);
    auto* o_s = tick_cmd->add_option("--seconds", *seconds);
    o_us->excludes(o_ms, o_s);
    o_ms->excludes(o_s);
    tick_cmd->require_option(1);
    tick_cmd->callback([&, us, ms, seconds] {
        Json j = Json::object();
        put(j, "us", *us);
        put(j, "ms", *ms);
        put(j, "seconds", *seconds);
        request("POST", "/tick", j);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (serve_cmd->parsed()) {
        config.tick = tick == "realtime" ? manetlab::control::TickPolicy::Realtime
                                         : manetlab::control::TickPolicy::Manual;
        config.tick_period = std::chrono::milliseconds(tick_ms);
        return serve(config);
    }
    if (follow_events) {
        std::signal(SIGINT, on_signal);
        return follow(server, call.path);
    }
    return perform(server, call);
}
