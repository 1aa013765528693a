#include "manetlab/control/api.hpp"

#include <filesystem>
#include <fstream>

#include "manetlab/control/json_codec.hpp"
#include "text.hpp"

namespace manetlab::control {

namespace {

Response json_response(const Json& j, int status = 200) {
    return Response{status, "application/json", dump(j)};
}

Response text_response(std::string body, std::string content_type) {
    return Response{200, std::move(content_type), std::move(body)};
}

Response error_response(const Error& e) { return json_response(error_json(e), http_status(e.code())); }

// Routing failures are not testbed errors, so they get their own type.
struct RouteError {
    int status;
    std::string name;
    std::string message;
};

[[noreturn]] void not_found(const Request& r) {
    throw RouteError{404, "NotFound", "no route for " + r.method + " " + r.path};
}

[[noreturn]] void bad_method(const Request& r) {
    throw RouteError{405, "MethodNotAllowed", "method " + r.method + " not allowed on " + r.path};
}

std::vector<std::string> segments(std::string_view path) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < path.size()) {
        while (i < path.size() && path[i] == '/') ++i;
        std::size_t j = path.find('/', i);
        if (j == std::string_view::npos) j = path.size();
        if (j > i) out.emplace_back(path.substr(i, j - i));
        i = j;
    }
    return out;
}

std::uint64_t id_segment(const std::string& s, const char* what) {
    auto v = text::parse_uint<std::uint64_t>(s);
    if (!v) throw Error(Errc::MalformedRequest, std::string(what) + " must be a number, got '" + s + "'");
    return *v;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out || !(out << content) || !out.flush()) {
        throw Error(Errc::ConfigError, "cannot write " + path);
    }
}

Json nodes_json(const Registry& reg) {
    Json list = Json::array();
    for (const auto& n : reg.nodes()) list.push_back(to_json(n));
    return list;
}

}  // namespace

std::string_view to_string(TickPolicy policy) {
    return policy == TickPolicy::Manual ? "manual" : "realtime";
}

int http_status(Errc code) {
    switch (code) {
    case Errc::UnknownNode:
    case Errc::UnknownScenario:
    case Errc::UnknownAttack:
    case Errc::UnknownFlow:
        return 404;
    case Errc::DuplicateName:
    case Errc::DuplicateAddress:
    case Errc::NodeInUse:
    case Errc::StaleScenario:
    case Errc::RejectedTopology:
    case Errc::DimensionMismatch:
    case Errc::Busy:
    case Errc::AlreadyPlaying:
    case Errc::DuplicateAttack:
        return 409;
    case Errc::GenerationExhausted:
    case Errc::CommandFailed:
        return 422;
    case Errc::BackendError:
        return 502;
    case Errc::ConfigError:
        return 409;
    case Errc::BindError:
        return 500;
    case Errc::InvalidFormat:
    case Errc::ParseError:
    case Errc::Infeasible:
    case Errc::MalformedMatrix:
    case Errc::MacSpoof:
    case Errc::OutOfRange:
    case Errc::BadHex:
    case Errc::FrameTooShort:
    case Errc::InvalidSpec:
    case Errc::MalformedRequest:
        return 400;
    }
    return 500;
}

Response Api::handle(const Request& request) {
    try {
        return route(request, segments(request.path));
    } catch (const Error& e) {
        return error_response(e);
    } catch (const RouteError& e) {
        return json_response(Json{{"error", e.name}, {"message", e.message}}, e.status);
    } catch (const std::exception& e) {
        return json_response(Json{{"error", "Internal"}, {"message", e.what()}}, 500);
    }
}

Response Api::route(const Request& r, const std::vector<std::string>& seg) {
    if (seg.empty()) not_found(r);
    const auto& head = seg[0];
    if (head == "health" && seg.size() == 1) {
        if (r.method != "GET") bad_method(r);
        return health();
    }
    if (head == "nodes") return nodes(r, seg);
    if (head == "scenarios") return scenarios(r, seg);
    if (head == "attacks") return attacks(r, seg);
    if (head == "flows") return flows(r, seg);
    if (head == "events" && seg.size() == 1) {
        if (r.method != "GET") bad_method(r);
        return events(r);
    }
    if (head == "tick" && seg.size() == 1) {
        if (r.method != "POST") bad_method(r);
        return tick(r);
    }
    if (head == "topology" && seg.size() == 2 && seg[1] == "current.dot") {
        if (r.method != "GET") bad_method(r);
        auto dot = controller_.read([](const Testbed& bed) { return bed.current_dot(); });
        if (!dot) {
            return json_response(Json{{"error", "OutOfRange"}, {"message", "no topology has been applied"}},
                                 404);
        }
        return text_response(*dot, "text/vnd.graphviz");
    }
    if (head == "inject" && seg.size() == 1) {
        if (r.method != "POST") bad_method(r);
        RequestBody body(r.body, {"hex", "as_node"});
        InjectionSpec spec{body.str("hex"), body.str("as_node")};
        auto received = controller_.write([&](Testbed& bed) { return bed.inject(spec); });
        Json list = Json::array();
        for (const auto& n : received) list.push_back(n);
        return json_response(Json{{"as_node", spec.as_node}, {"received", list}});
    }
    if (head == "probe" && seg.size() == 2 && seg[1] == "ping") {
        if (r.method != "POST") bad_method(r);
        RequestBody body(r.body, {"src", "dst", "count", "timeout_ms"});
        auto src = body.str("src");
        auto dst = body.str("dst");
        auto count = static_cast<std::uint32_t>(body.opt_uint("count", 100000).value_or(3));
        auto timeout = static_cast<std::uint32_t>(body.opt_uint("timeout_ms", 3'600'000).value_or(1000));
        auto report = controller_.write([&](Testbed& bed) { return bed.ping(src, dst, count, timeout); });
        return json_response(to_json(report));
    }
    if (head == "exec" && seg.size() == 1) {
        if (r.method != "POST") bad_method(r);
        RequestBody body(r.body, {"node", "command"});
        auto node = body.str("node");
        auto result = controller_.exec(node, body.str("command"));
        if (result.exit_code != 0) throw CommandFailed(result.exit_code, result.output);
        Json j{{"node", node}};
        const Json fields = to_json(result);
        for (const auto& [k, v] : fields.items()) j[k] = v;
        return json_response(j);
    }
    not_found(r);
}

Response Api::health() {
    return controller_.read([&](const Testbed& bed) {
        return json_response(Json{{"status", "ok"},
                                  {"backend", std::string(bed.backend().name())},
                                  {"tick", std::string(to_string(options_.tick))},
                                  {"now_us", bed.now()},
                                  {"nodes", bed.registry().size()},
                                  {"exec_active", controller_.exec_active()}});
    });
}

Response Api::nodes(const Request& r, const std::vector<std::string>& seg) {
    if (seg.size() == 1 && r.method == "GET") {
        return controller_.read([](const Testbed& bed) { return json_response(nodes_json(bed.registry())); });
    }
    if (seg.size() == 1 && r.method == "POST") {
        RequestBody body(r.body, kNodeKeys);
        auto record = node_from(body);
        return controller_.write([&](Testbed& bed) {
            auto [index, warnings] = bed.add_node(record);
            persist_registry(bed);
            Json w = Json::array();
            for (const auto& s : warnings) w.push_back(s);
            return json_response(Json{{"index", index}, {"node", to_json(bed.registry().at(index))}, {"warnings", w}},
                                 201);
        });
    }
    if (r.method == "DELETE" && seg.size() <= 2) {
        std::string name;
        if (seg.size() == 2) {
            name = seg[1];
        } else {
            name = RequestBody(r.body, {"name"}).str("name");
        }
        return controller_.write([&](Testbed& bed) {
            auto remaining = bed.remove_node(name);
            persist_registry(bed);
            return json_response(Json{{"removed", name}, {"remaining", remaining}});
        });
    }
    if (seg.size() == 2 && r.method == "GET") {
        return controller_.read(
            [&](const Testbed& bed) { return json_response(to_json(bed.registry().get(seg[1]))); });
    }
    if (seg.size() <= 2) bad_method(r);
    not_found(r);
}

Response Api::scenarios(const Request& r, const std::vector<std::string>& seg) {
    if (seg.size() == 1) {
        if (r.method == "GET") {
            return controller_.read([](const Testbed& bed) {
                Json list = Json::array();
                for (const auto& name : bed.scenario_names()) list.push_back(to_json(bed.scenario(name)));
                return json_response(list);
            });
        }
        if (r.method != "POST") bad_method(r);
        RequestBody body(r.body, {"name", "nodes", "topologies", "density", "maxdeg", "seed", "interval",
                                  "max_attempts"});
        auto name = body.str("name");
        GenParams p;
        p.n = static_cast<std::size_t>(body.uint("nodes", 100000));
        p.density_pct = static_cast<int>(body.uint("density", 1000));
        p.max_degree = static_cast<int>(body.uint("maxdeg", 100000));
        p.seed = body.opt_uint("seed").value_or(0);
        p.max_attempts = body.opt_uint("max_attempts", 100'000'000).value_or(p.max_attempts);
        auto count = static_cast<std::size_t>(body.uint("topologies", 100000));
        auto interval = static_cast<std::uint32_t>(
            body.opt_uint("interval", UINT32_MAX).value_or(kDefaultReplayIntervalSeconds));
        return controller_.write([&](Testbed& bed) {
            const auto& s = bed.build_scenario(name, p, count, interval);
            persist_scenario(bed, s.name);
            return json_response(to_json(s), 201);
        });
    }
    if (seg.size() == 2 && seg[1] == "import") {
        if (r.method != "POST") bad_method(r);
        RequestBody body(r.body, {"file"});
        auto file = body.str("file");
        return controller_.write([&](Testbed& bed) {
            const auto& s = bed.load_scenario(file);
            persist_scenario(bed, s.name);
            return json_response(to_json(s), 201);
        });
    }

    const std::string& name = seg[1];
    if (seg.size() == 2) {
        if (r.method != "GET") bad_method(r);
        return controller_.read([&](const Testbed& bed) { return json_response(to_json(bed.scenario(name))); });
    }
    const std::string& what = seg[2];
    if (what == "file" && seg.size() == 3) {
        if (r.method != "GET") bad_method(r);
        return controller_.read([&](const Testbed& bed) {
            auto file = bed.save_scenario(name);
            return json_response(Json{{"name", name}, {"file", std::move(file)}});
        });
    }
    if (what == "topologies" && seg.size() == 4) {
        if (r.method != "GET") bad_method(r);
        std::string leaf = seg[3];
        const std::string suffix = ".dot";
        if (leaf.size() <= suffix.size() || leaf.compare(leaf.size() - suffix.size(), suffix.size(), suffix) != 0) {
            not_found(r);
        }
        auto seq = id_segment(leaf.substr(0, leaf.size() - suffix.size()), "topology number");
        return controller_.read([&](const Testbed& bed) {
            const auto& s = bed.scenario(name);
            if (seq >= s.size()) {
                throw Error(Errc::OutOfRange, "scenario '" + name + "' has " + std::to_string(s.size()) +
                                                  " topologies");
            }
            const auto& reg = bed.registry();
            if (s.params.n > reg.size()) {
                throw Error(Errc::DimensionMismatch, "scenario has more nodes than the registry");
            }
            std::vector<std::string> names;
            for (std::size_t i = 0; i < s.params.n; ++i) names.push_back(reg.at(i).name);
            return text_response(to_dot(s.topologies[seq], names), "text/vnd.graphviz");
        });
    }
    if (what == "apply" && seg.size() == 4) {
        if (r.method != "POST") bad_method(r);
        auto seq = id_segment(seg[3], "topology number");
        RequestBody body(r.body, {"force"});
        bool force = body.flag("force", false);
        return controller_.write([&](Testbed& bed) {
            auto at = bed.apply_topology(name, seq, force);
            return json_response(Json{{"scenario", name}, {"seq", seq}, {"applied_at_us", at}});
        });
    }
    if (what == "play" && seg.size() == 3) {
        if (r.method == "POST") {
            RequestBody body(r.body, {"from", "to"});
            auto from = body.uint("from");
            auto to = body.uint("to");
            return controller_.write([&](Testbed& bed) {
                auto plan = bed.play(name, from, to);
                Json steps = Json::array();
                for (const auto& [at, seq] : plan) steps.push_back(Json{{"seq", seq}, {"at_us", at}});
                return json_response(Json{{"scenario", name}, {"schedule", steps}});
            });
        }
        if (r.method == "DELETE") {
            return controller_.write([&](Testbed& bed) {
                bed.scenario(name);
                const Scenario* playing = bed.playing();
                if (!playing || playing->name != name) {
                    throw Error(Errc::OutOfRange, "scenario '" + name + "' is not playing");
                }
                auto cancelled = bed.stop_play();
                return json_response(Json{{"scenario", name}, {"cancelled", cancelled}});
            });
        }
        bad_method(r);
    }
    not_found(r);
}

Response Api::attacks(const Request& r, const std::vector<std::string>& seg) {
    if (seg.size() == 1) {
        if (r.method == "GET") {
            return controller_.read([](const Testbed& bed) {
                Json active = Json::array();
                for (const auto& a : bed.adversary().active()) active.push_back(to_json(a));
                Json saved = Json::array();
                for (const auto& n : bed.list_attacks()) saved.push_back(n);
                return json_response(Json{{"active", active}, {"saved", saved}});
            });
        }
        if (r.method == "DELETE") {
            auto id = RequestBody(r.body, {"id"}).uint("id");
            return controller_.write([&](Testbed& bed) {
                auto at = bed.stop_attack(id);
                return json_response(Json{{"id", id}, {"stopped_at_us", at}});
            });
        }
        if (r.method != "POST") bad_method(r);
        auto spec = attack_from(RequestBody(r.body, kAttackKeys));
        return controller_.write([&](Testbed& bed) {
            auto id = bed.launch_attack(spec);
            for (const auto& a : bed.adversary().active()) {
                if (a.id == id) return json_response(to_json(a), 201);
            }
            return json_response(Json{{"id", id}}, 201);
        });
    }
    if (seg[1] == "saved") {
        if (seg.size() == 2) {
            if (r.method == "GET") {
                return controller_.read([](const Testbed& bed) {
                    Json list = Json::array();
                    for (const auto& n : bed.list_attacks()) list.push_back(to_json(bed.adversary().saved(n)));
                    return json_response(list);
                });
            }
            if (r.method != "POST") bad_method(r);
            auto spec = attack_from(RequestBody(r.body, kAttackKeys));
            return controller_.write([&](Testbed& bed) {
                bed.save_attack(spec);
                persist_attacks(bed);
                return json_response(to_json(spec), 201);
            });
        }
        if (seg.size() == 3 && seg[2] == "import") {
            if (r.method != "POST") bad_method(r);
            auto file = RequestBody(r.body, {"file"}).str("file");
            return controller_.write([&](Testbed& bed) {
                bed.load_attack_list(file);
                persist_attacks(bed);
                Json list = Json::array();
                for (const auto& n : bed.list_attacks()) list.push_back(n);
                return json_response(Json{{"saved", list}});
            });
        }
        if (seg.size() == 4 && seg[3] == "replay") {
            if (r.method != "POST") bad_method(r);
            RequestBody(r.body, {});
            const std::string& name = seg[2];
            return controller_.write([&](Testbed& bed) {
                auto id = bed.replay_attack(name);
                for (const auto& a : bed.adversary().active()) {
                    if (a.id == id) return json_response(to_json(a), 201);
                }
                return json_response(Json{{"id", id}}, 201);
            });
        }
        not_found(r);
    }
    if (seg.size() == 2) {
        auto id = id_segment(seg[1], "attack id");
        if (r.method == "GET") {
            return controller_.read([&](const Testbed& bed) {
                for (const auto& a : bed.adversary().active()) {
                    if (a.id == id) return json_response(to_json(a));
                }
                throw Error(Errc::UnknownAttack, "no active attack with id " + std::to_string(id));
            });
        }
        if (r.method != "DELETE") bad_method(r);
        return controller_.write([&](Testbed& bed) {
            auto at = bed.stop_attack(id);
            return json_response(Json{{"id", id}, {"stopped_at_us", at}});
        });
    }
    not_found(r);
}

Response Api::flows(const Request& r, const std::vector<std::string>& seg) {
    auto flow_json = [](const Testbed& bed, std::uint64_t id) {
        const auto& t = bed.traffic();
        // look up first; gcc 11 leaks half-built init lists when a lookup throws
        Json spec = to_json(t.spec(id));
        Json stats = to_json(t.stats(id));
        const bool finished = t.finished(id);
        return Json{{"id", id}, {"spec", std::move(spec)}, {"stats", std::move(stats)}, {"finished", finished}};
    };
    if (seg.size() == 1) {
        if (r.method == "GET") {
            return controller_.read([&](const Testbed& bed) {
                Json list = Json::array();
                for (auto id : bed.traffic().flows()) list.push_back(flow_json(bed, id));
                return json_response(list);
            });
        }
        if (r.method == "DELETE") {
            auto id = RequestBody(r.body, {"id"}).uint("id");
            return controller_.write([&](Testbed& bed) {
                auto stats = bed.stop_flow(id);
                return json_response(Json{{"id", id}, {"stats", to_json(stats)}});
            });
        }
        if (r.method != "POST") bad_method(r);
        auto spec = flow_from(RequestBody(r.body, kFlowKeys));
        return controller_.write([&](Testbed& bed) {
            auto id = bed.start_flow(spec);
            return json_response(flow_json(bed, id), 201);
        });
    }
    if (seg.size() == 2) {
        auto id = id_segment(seg[1], "flow id");
        if (r.method == "GET") {
            return controller_.read([&](const Testbed& bed) { return json_response(flow_json(bed, id)); });
        }
        if (r.method != "DELETE") bad_method(r);
        return controller_.write([&](Testbed& bed) {
            auto stats = bed.stop_flow(id);
            return json_response(Json{{"id", id}, {"stats", to_json(stats)}});
        });
    }
    not_found(r);
}

Response Api::events(const Request& r) {
    std::size_t since = 0;
    if (auto it = r.query.find("since"); it != r.query.end()) {
        since = static_cast<std::size_t>(id_segment(it->second, "since"));
    }
    auto batch = controller_.events().read(since, SIZE_MAX, std::chrono::milliseconds(0));
    std::string body;
    for (const auto& line : batch.lines) body += line;
    return text_response(std::move(body), "application/x-ndjson");
}

Response Api::tick(const Request& r) {
    if (options_.tick != TickPolicy::Manual) {
        throw Error(Errc::ConfigError, "the tick endpoint is only available under the manual tick policy");
    }
    RequestBody body(r.body, {"us", "ms", "seconds"});
    int given = body.has("us") + body.has("ms") + body.has("seconds");
    if (given != 1) throw Error(Errc::MalformedRequest, "give exactly one of us, ms, seconds");
    const std::uint64_t limit = static_cast<std::uint64_t>(INT64_MAX / kSecond);
    VirtualTime delta = 0;
    if (body.has("us")) delta = static_cast<VirtualTime>(body.uint("us", limit * kSecond));
    if (body.has("ms")) delta = static_cast<VirtualTime>(body.uint("ms", limit * 1000)) * kMillisecond;
    if (body.has("seconds")) delta = static_cast<VirtualTime>(body.uint("seconds", limit)) * kSecond;
    return controller_.write([&](Testbed& bed) {
        auto processed = bed.tick(delta);
        return json_response(Json{{"now_us", bed.now()}, {"processed", processed}});
    });
}

void Api::persist_registry(const Testbed& bed) const {
    if (!options_.registry_path.empty()) write_file(options_.registry_path, bed.registry().save());
}

void Api::persist_attacks(const Testbed& bed) const {
    if (!options_.attacks_path.empty()) write_file(options_.attacks_path, bed.adversary().save_attack_list());
}

void Api::persist_scenario(const Testbed& bed, std::string_view name) const {
    if (options_.scenario_dir.empty()) return;
    auto path = std::filesystem::path(options_.scenario_dir) / (std::string(name) + ".scn");
    write_file(path.string(), bed.save_scenario(name));
}

}  // namespace manetlab::control
