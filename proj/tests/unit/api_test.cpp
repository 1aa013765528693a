#include <doctest.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include "check.hpp"
#include "fixtures.hpp"
#include "manetlab/control/api.hpp"
#include "manetlab/control/json_codec.hpp"
#include "manetlab/topology.hpp"

using namespace manetlab;
using namespace manetlab::control;
using manetlab::testing::three_nodes;

namespace {

struct Rig {
    explicit Rig(Registry reg = three_nodes(), ApiOptions options = {})
        : controller(std::make_unique<Testbed>(std::move(reg), std::make_unique<SimulatedBackend>())),
          api(controller, std::move(options)) {}

    Response call(std::string method, std::string path, std::string body = "",
                  std::map<std::string, std::string> query = {}) {
        return api.handle(Request{std::move(method), std::move(path), std::move(query), std::move(body)});
    }
    Json json(std::string method, std::string path, std::string body = "") {
        auto r = call(std::move(method), std::move(path), std::move(body));
        return Json::parse(r.body);
    }
    std::vector<Json> events(std::size_t since = 0) {
        auto r = call("GET", "/events", "", {{"since", std::to_string(since)}});
        std::vector<Json> out;
        std::istringstream in(r.body);
        for (std::string line; std::getline(in, line);) out.push_back(Json::parse(line));
        return out;
    }

    Controller controller;
    Api api;
};

// K3 with three nodes: density 100, every node degree 2.
const char* kFullScenario =
    R"({"name":"full","nodes":3,"topologies":10,"density":100,"maxdeg":2,"seed":1,"interval":30})";

std::string read_text(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("health reports backend and tick policy") {
    Rig rig;
    auto r = rig.call("GET", "/health");
    CHECK(r.status == 200);
    CHECK(r.content_type == "application/json");
    CHECK(r.body ==
          "{\"status\":\"ok\",\"backend\":\"simulated\",\"tick\":\"manual\",\"now_us\":0,\"nodes\":3,"
          "\"exec_active\":false}\n");
}

TEST_CASE("routing failures") {
    Rig rig;
    auto r = rig.call("GET", "/nope");
    CHECK(r.status == 404);
    CHECK(Json::parse(r.body)["error"] == "NotFound");
    r = rig.call("PUT", "/health");
    CHECK(r.status == 405);
    CHECK(Json::parse(r.body)["error"] == "MethodNotAllowed");
    CHECK(rig.call("GET", "/").status == 404);
}

TEST_CASE("http status per error code") {
    CHECK(http_status(Errc::MalformedRequest) == 400);
    CHECK(http_status(Errc::UnknownNode) == 404);
    CHECK(http_status(Errc::Busy) == 409);
    CHECK(http_status(Errc::NodeInUse) == 409);
    CHECK(http_status(Errc::GenerationExhausted) == 422);
    CHECK(http_status(Errc::CommandFailed) == 422);
    CHECK(http_status(Errc::BackendError) == 502);
}

TEST_CASE("nodes") {
    Rig rig;
    auto list = rig.json("GET", "/nodes");
    REQUIRE(list.size() == 3);
    CHECK(list[0]["name"] == "sai");
    CHECK(list[1]["wireless_mac"] == "bb:00:00:00:00:02");

    const std::string dave =
        R"({"name":"dave","wired_ip":"10.0.0.9","wired_mac":"aa:00:00:00:00:09",)"
        R"("wireless_ip":"192.168.0.9","wireless_mac":"bb:00:00:00:00:09"})";
    auto r = rig.call("POST", "/nodes", dave);
    CHECK(r.status == 201);
    auto j = Json::parse(r.body);
    CHECK(j["index"] == 3);
    CHECK(j["warnings"].empty());

    r = rig.call("POST", "/nodes", dave);
    CHECK(r.status == 409);
    CHECK(Json::parse(r.body)["error"] == "DuplicateName");

    SUBCASE("unknown fields are rejected") {
        auto bad = rig.call("POST", "/nodes",
                            R"({"name":"x","wired_ip":"10.0.0.8","wired_mac":"aa:00:00:00:00:08",)"
                            R"("wireless_ip":"192.168.0.8","wireless_mac":"bb:00:00:00:00:08","colour":"red"})");
        CHECK(bad.status == 400);
        CHECK(Json::parse(bad.body)["error"] == "MalformedRequest");
    }
    SUBCASE("bad address") {
        auto bad = rig.call("POST", "/nodes",
                            R"({"name":"x","wired_ip":"10.0.0","wired_mac":"aa:00:00:00:00:08",)"
                            R"("wireless_ip":"192.168.0.8","wireless_mac":"bb:00:00:00:00:08"})");
        CHECK(bad.status == 400);
        CHECK(Json::parse(bad.body)["error"] == "InvalidFormat");
    }
    SUBCASE("not json") {
        auto bad = rig.call("POST", "/nodes", "name=x");
        CHECK(bad.status == 400);
        CHECK(Json::parse(bad.body)["error"] == "MalformedRequest");
    }

    CHECK(rig.json("GET", "/nodes/dave")["wired_ip"] == "10.0.0.9");
    CHECK(rig.json("DELETE", "/nodes/dave")["remaining"] == 3);
    CHECK(rig.json("DELETE", "/nodes", R"({"name":"nitin"})")["remaining"] == 2);
    r = rig.call("DELETE", "/nodes/nitin");
    CHECK(r.status == 404);
    CHECK(Json::parse(r.body)["error"] == "UnknownNode");
}

TEST_CASE("scenario topology as DOT equals to_dot of the stored matrix") {
    Rig rig;
    auto r = rig.call("POST", "/scenarios",
                      R"({"name":"s","nodes":3,"topologies":10,"density":50,"maxdeg":2,"seed":7})");
    REQUIRE(r.status == 201);
    auto s = Json::parse(r.body);
    CHECK(s["name"] == "s");
    CHECK(s["topologies"] == 10);

    const std::vector<std::string> names{"sai", "pritu", "nitin"};
    for (std::size_t seq = 0; seq < 10; ++seq) {
        auto dot = rig.call("GET", "/scenarios/s/topologies/" + std::to_string(seq) + ".dot");
        CHECK(dot.status == 200);
        CHECK(dot.content_type == "text/vnd.graphviz");
        auto expected = rig.controller.read([&](const Testbed& bed) {
            return to_dot(bed.scenario("s").topologies[seq], names);
        });
        CHECK(dot.body == expected);
        // And the DOT parses back to the same matrix.
        auto parsed = parse_dot(dot.body, names);
        auto stored = rig.controller.read([&](const Testbed& bed) { return bed.scenario("s").topologies[seq]; });
        CHECK(parsed == stored.adjacency);
    }

    CHECK(rig.call("GET", "/scenarios/s/topologies/10.dot").status == 400);
    CHECK(rig.call("GET", "/scenarios/s/topologies/x.dot").status == 400);
    CHECK(rig.call("GET", "/scenarios/s/topologies/1").status == 404);
    CHECK(rig.call("GET", "/scenarios/zz").status == 404);

    auto file = rig.json("GET", "/scenarios/s/file");
    CHECK(file["file"] == rig.controller.read([](const Testbed& bed) { return bed.save_scenario("s"); }));
    CHECK(rig.json("GET", "/scenarios").size() == 1);
}

TEST_CASE("scenario build errors") {
    Rig rig;
    auto r = rig.call("POST", "/scenarios", R"({"name":"s","nodes":3,"topologies":2,"density":100,"maxdeg":1})");
    CHECK(r.status == 400);
    CHECK(Json::parse(r.body)["error"] == "Infeasible");
    r = rig.call("POST", "/scenarios", R"({"name":"s","nodes":3,"topologies":2,"density":100})");
    CHECK(r.status == 400);
    CHECK(Json::parse(r.body)["error"] == "MalformedRequest");
    Rig eight(manetlab::testing::numbered_nodes(8));
    r = eight.call("POST", "/scenarios",
                   R"({"name":"s","nodes":8,"topologies":1,"density":10,"maxdeg":2,"max_attempts":1})");
    CHECK(r.status == 422);
    CHECK(Json::parse(r.body)["error"] == "GenerationExhausted");
}

TEST_CASE("apply and current topology") {
    Rig rig;
    auto none = rig.call("GET", "/topology/current.dot");
    CHECK(none.status == 404);
    REQUIRE(rig.call("POST", "/scenarios", kFullScenario).status == 201);
    auto r = rig.call("POST", "/scenarios/full/apply/0");
    CHECK(r.status == 200);
    CHECK(r.body == "{\"scenario\":\"full\",\"seq\":0,\"applied_at_us\":0}\n");
    auto dot = rig.call("GET", "/topology/current.dot");
    CHECK(dot.status == 200);
    CHECK(dot.body.find("\"sai\" -- \"pritu\";") != std::string::npos);

    CHECK(rig.call("POST", "/scenarios/full/apply/10").status == 400);
    CHECK(rig.call("POST", "/scenarios/full/apply/1", R"({"force":"yes"})").status == 400);
    CHECK(rig.call("POST", "/scenarios/full/apply/1", R"({"force":false})").status == 200);

    // The applied nodes cannot be removed.
    auto busy = rig.call("DELETE", "/nodes/sai");
    CHECK(busy.status == 409);
    CHECK(Json::parse(busy.body)["error"] == "NodeInUse");
}

TEST_CASE("play 0..9 yields exactly ten APPLY events in order") {
    Rig rig;
    REQUIRE(rig.call("POST", "/scenarios", kFullScenario).status == 201);
    auto plan = rig.json("POST", "/scenarios/full/play", R"({"from":0,"to":9})");
    REQUIRE(plan["schedule"].size() == 10);
    for (std::size_t i = 0; i < 10; ++i) {
        CHECK(plan["schedule"][i]["seq"] == i);
        CHECK(plan["schedule"][i]["at_us"] == i * 30 * kSecond);
    }
    auto again = rig.call("POST", "/scenarios/full/play", R"({"from":0,"to":9})");
    CHECK(again.status == 409);
    CHECK(Json::parse(again.body)["error"] == "AlreadyPlaying");

    CHECK(rig.json("POST", "/tick", R"({"seconds":300})")["now_us"] == 300 * kSecond);
    std::vector<std::string> applied;
    for (const auto& e : rig.events()) {
        if (e["kind"] == "APPLY") applied.push_back(e["fields"]["seq"].get<std::string>());
    }
    CHECK(applied == std::vector<std::string>{"0", "1", "2", "3", "4", "5", "6", "7", "8", "9"});
}

TEST_CASE("cancel playback") {
    Rig rig;
    REQUIRE(rig.call("POST", "/scenarios", kFullScenario).status == 201);
    CHECK(rig.call("DELETE", "/scenarios/full/play").status == 400);
    REQUIRE(rig.call("POST", "/scenarios/full/play", R"({"from":0,"to":9})").status == 200);
    rig.call("POST", "/tick", R"({"seconds":90})");
    CHECK(rig.json("DELETE", "/scenarios/full/play")["cancelled"] == 6);
}

TEST_CASE("events stream sequence numbers and since") {
    Rig rig;
    REQUIRE(rig.call("POST", "/scenarios", kFullScenario).status == 201);
    rig.call("POST", "/scenarios/full/apply/0");
    rig.call("POST", "/probe/ping", R"({"src":"sai","dst":"pritu","count":1})");
    auto all = rig.events();
    REQUIRE(all.size() >= 3);
    for (std::size_t i = 0; i < all.size(); ++i) {
        CHECK(all[i]["seq"] == i);
        if (i > 0) CHECK(all[i]["time_us"].get<std::int64_t>() >= all[i - 1]["time_us"].get<std::int64_t>());
    }
    auto tail = rig.events(2);
    CHECK(tail.size() == all.size() - 2);
    CHECK(tail[0] == all[2]);
    CHECK(rig.events(all.size()).empty());
    CHECK(rig.call("GET", "/events", "", {{"since", "x"}}).status == 400);
    // Matches the testbed trace one for one.
    auto trace_size = rig.controller.read([](const Testbed& bed) { return bed.medium().trace().size(); });
    CHECK(all.size() == trace_size);
}

TEST_CASE("ping through the API") {
    Rig rig;
    REQUIRE(rig.call("POST", "/scenarios", kFullScenario).status == 201);
    rig.call("POST", "/scenarios/full/apply/0");
    auto r = rig.json("POST", "/probe/ping", R"({"src":"sai","dst":"pritu"})");
    CHECK(r["summary"] == "3 packets transmitted, 3 received, 0% packet loss");
    CHECK(r["loss_pct"] == 0);
    auto bad = rig.call("POST", "/probe/ping", R"({"src":"sai","dst":"ghost"})");
    CHECK(bad.status == 404);
    bad = rig.call("POST", "/probe/ping", R"({"src":"sai","dst":"pritu","count":0})");
    CHECK(bad.status == 400);
}

TEST_CASE("attacks") {
    Rig rig;
    auto r = rig.call("POST", "/attacks", R"({"name":"deaf","target":"nitin","kind":"block-incoming"})");
    REQUIRE(r.status == 201);
    auto a = Json::parse(r.body);
    CHECK(a["id"] == 1);
    CHECK(a["name"] == "deaf");
    CHECK(rig.call("POST", "/attacks", R"({"name":"deaf","target":"nitin","kind":"block-incoming"})").status ==
          409);
    CHECK(rig.call("POST", "/attacks", R"({"name":"x","target":"nitin","kind":"block-incoming","cycles":3})")
              .status == 400);
    CHECK(rig.call("POST", "/attacks", R"({"name":"x","target":"ghost"})").status == 404);

    auto listing = rig.json("GET", "/attacks");
    CHECK(listing["active"].size() == 1);
    CHECK(listing["saved"].empty());
    CHECK(rig.json("GET", "/attacks/1")["target"] == "nitin");

    CHECK(rig.call("DELETE", "/attacks/1").status == 200);
    CHECK(rig.call("DELETE", "/attacks/1").status == 404);
    CHECK(rig.call("DELETE", "/attacks/zz").status == 400);

    r = rig.call("POST", "/attacks/saved",
                 R"({"name":"flaky","target":"pritu","protocol":"udp","kind":"periodic-loss","loss_s":2,"normal_s":8,"cycles":3})");
    CHECK(r.status == 201);
    CHECK(rig.json("GET", "/attacks/saved")[0]["loss_s"] == 2);
    r = rig.call("POST", "/attacks/saved/flaky/replay");
    CHECK(r.status == 201);
    auto replayed = Json::parse(r.body);
    CHECK(rig.call("DELETE", "/attacks", "{\"id\":" + replayed["id"].dump() + "}").status == 200);
    CHECK(rig.call("POST", "/attacks/saved/ghost/replay").status == 404);

    r = rig.call("POST", "/attacks/saved/import", R"({"file":"a nitin all block-outgoing\nb sai icmp block-both\n"})");
    CHECK(r.status == 200);
    CHECK(Json::parse(r.body)["saved"] == Json::array({"a", "b"}));
    r = rig.call("POST", "/attacks/saved/import", R"({"file":"a nitin all block-outgoing\nbroken\n"})");
    CHECK(r.status == 400);
    CHECK(Json::parse(r.body)["error"] == "ParseError");
    CHECK(Json::parse(r.body)["line"] == 2);
}

TEST_CASE("inject") {
    Rig rig;
    REQUIRE(rig.call("POST", "/scenarios", kFullScenario).status == 201);
    rig.call("POST", "/scenarios/full/apply/0");
    // Broadcast destination, sai's source MAC, IPv4 ethertype.
    auto r = rig.json("POST", "/inject", R"({"hex":"ffffffffffffbb00000000010800","as_node":"sai"})");
    CHECK(r["received"] == Json::array({"pritu", "nitin"}));
    CHECK(rig.call("POST", "/inject", R"({"hex":"abc","as_node":"sai"})").status == 400);
    CHECK(rig.call("POST", "/inject", R"({"hex":"ffff","as_node":"sai"})").status == 400);
}

TEST_CASE("flows") {
    Rig rig;
    REQUIRE(rig.call("POST", "/scenarios", kFullScenario).status == 201);
    rig.call("POST", "/scenarios/full/apply/0");
    auto r = rig.call("POST", "/flows", R"({"src":"sai","dst":"nitin","protocol":"udp","port":9,"count":10})");
    REQUIRE(r.status == 201);
    auto id = Json::parse(r.body)["id"].get<std::uint64_t>();
    rig.call("POST", "/tick", R"({"seconds":20})");
    auto f = rig.json("GET", "/flows/" + std::to_string(id));
    CHECK(f["stats"]["sent"] == 10);
    CHECK(f["stats"]["received"] == 10);
    CHECK(f["finished"] == true);
    CHECK(rig.json("GET", "/flows").size() == 1);

    auto endless = Json::parse(rig.call("POST", "/flows", R"({"src":"sai","dst":"pritu"})").body)["id"];
    rig.call("POST", "/tick", R"({"ms":2500})");
    auto stopped = rig.json("DELETE", "/flows", "{\"id\":" + endless.dump() + "}");
    CHECK(stopped["stats"]["sent"] == 3);
    CHECK(rig.call("GET", "/flows/999").status == 404);
    CHECK(rig.call("POST", "/flows", R"({"src":"sai","dst":"pritu","protocol":"icmp","port":5})").status == 400);
}

TEST_CASE("tick arguments") {
    Rig rig;
    CHECK(rig.call("POST", "/tick", "{}").status == 400);
    CHECK(rig.call("POST", "/tick", R"({"us":1,"ms":1})").status == 400);
    CHECK(rig.json("POST", "/tick", R"({"us":5})")["now_us"] == 5);

    Rig realtime(three_nodes(), ApiOptions{TickPolicy::Realtime, "", "", ""});
    auto r = realtime.call("POST", "/tick", R"({"us":5})");
    CHECK(r.status == 409);
    CHECK(Json::parse(r.body)["error"] == "ConfigError");
    CHECK(realtime.json("GET", "/health")["tick"] == "realtime");
}

TEST_CASE("exec results") {
    Rig rig;
    auto ok = rig.call("POST", "/exec", R"({"node":"sai","command":"echo hello"})");
    CHECK(ok.status == 200);
    CHECK(ok.body == "{\"node\":\"sai\",\"exit_code\":0,\"output\":\"hello\\n\"}\n");
    auto failed = rig.call("POST", "/exec", R"({"node":"sai","command":"reboot"})");
    CHECK(failed.status == 422);
    auto j = Json::parse(failed.body);
    CHECK(j["error"] == "CommandFailed");
    CHECK(j["exit_code"] == 127);
    CHECK(rig.call("POST", "/exec", R"({"node":"ghost","command":"true"})").status == 404);
    CHECK_FALSE(rig.controller.exec_active());
}

TEST_CASE("every mutation is Busy while exec runs, reads still work") {
    Rig rig;
    REQUIRE(rig.call("POST", "/scenarios", kFullScenario).status == 201);
    std::thread exec([&] { rig.call("POST", "/exec", R"({"node":"sai","command":"sleep 400"})"); });
    while (!rig.controller.exec_active()) std::this_thread::yield();

    const std::vector<std::pair<std::string, std::string>> writes = {
        {"/scenarios/full/apply/0", ""},
        {"/attacks", R"({"name":"deaf","target":"nitin","kind":"block-incoming"})"},
        {"/flows", R"({"src":"sai","dst":"pritu","count":1})"},
        {"/tick", R"({"seconds":1})"},
        {"/probe/ping", R"({"src":"sai","dst":"pritu"})"},
        {"/exec", R"({"node":"pritu","command":"true"})"},
        {"/scenarios/full/play", R"({"from":0,"to":2})"},
    };
    for (const auto& w : writes) {
        const std::string& path = w.first;
        auto r = rig.call("POST", path, w.second);
        CHECK_MESSAGE(r.status == 409, path);
        CHECK_MESSAGE(Json::parse(r.body)["error"] == "Busy", path);
    }
    CHECK(rig.json("GET", "/health")["exec_active"] == true);
    CHECK(rig.call("GET", "/nodes").status == 200);
    exec.join();
    CHECK(rig.call("POST", "/scenarios/full/apply/0").status == 200);

    // Nothing happened between EXEC_START and EXEC_END.
    auto events = rig.events();
    std::vector<std::string> kinds;
    for (const auto& e : events) kinds.push_back(e["kind"]);
    auto start = std::find(kinds.begin(), kinds.end(), "EXEC_START");
    REQUIRE(start != kinds.end());
    CHECK(*(start + 1) == "EXEC_END");
}

TEST_CASE("concurrent writers are serialised") {
    Rig rig(Registry{});
    constexpr int kThreads = 8, kPerThread = 10;
    std::vector<std::thread> threads;
    std::mutex mu;
    std::set<std::uint64_t> indices;
    for (int t = 0; t < kThreads; ++t) {
        threads.emplace_back([&, t] {
            for (int k = 0; k < kPerThread; ++k) {
                int i = t * kPerThread + k + 1;
                auto n = manetlab::testing::node("n" + std::to_string(i), i);
                Json body{{"name", n.name},
                          {"wired_ip", n.wired_ip.to_string()},
                          {"wired_mac", n.wired_mac.to_string()},
                          {"wireless_ip", n.wireless_ip.to_string()},
                          {"wireless_mac", n.wireless_mac.to_string()}};
                auto r = rig.call("POST", "/nodes", body.dump());
                REQUIRE(r.status == 201);
                std::lock_guard lock(mu);
                indices.insert(Json::parse(r.body)["index"].get<std::uint64_t>());
            }
        });
    }
    for (auto& th : threads) th.join();
    // Each add saw exactly the prefix before it.
    CHECK(indices.size() == kThreads * kPerThread);
    CHECK(*indices.begin() == 0);
    CHECK(*indices.rbegin() == kThreads * kPerThread - 1);
    CHECK(rig.json("GET", "/nodes").size() == kThreads * kPerThread);
}

TEST_CASE("manual-tick scripts replay to identical event streams") {
    auto run = [] {
        Rig rig;
        rig.call("POST", "/scenarios", R"({"name":"s","nodes":3,"topologies":5,"density":60,"maxdeg":2,"seed":11})");
        rig.call("POST", "/scenarios/s/play", R"({"from":0,"to":4})");
        rig.call("POST", "/flows", R"({"src":"sai","dst":"nitin","protocol":"icmp","count":50})");
        rig.call("POST", "/attacks",
                 R"({"name":"flaky","target":"pritu","kind":"periodic-loss","loss_s":3,"normal_s":7,"cycles":4})");
        rig.call("POST", "/tick", R"({"seconds":45})");
        rig.call("POST", "/probe/ping", R"({"src":"nitin","dst":"sai"})");
        rig.call("POST", "/tick", R"({"seconds":200})");
        return rig.call("GET", "/events").body;
    };
    auto a = run();
    CHECK(a.size() > 1000);
    CHECK(a == run());
}

TEST_CASE("write-through persistence") {
    namespace fs = std::filesystem;
    auto dir = fs::temp_directory_path() / ("manetlab_api_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir / "scn");
    ApiOptions options{TickPolicy::Manual, (dir / "nodes.txt").string(), (dir / "attacks.txt").string(),
                       (dir / "scn").string()};
    Rig rig(three_nodes(), options);

    rig.call("DELETE", "/nodes/nitin");
    CHECK(read_text(dir / "nodes.txt") == rig.controller.read([](const Testbed& bed) { return bed.registry().save(); }));
    CHECK(Registry::load(read_text(dir / "nodes.txt")).size() == 2);

    rig.call("POST", "/attacks/saved", R"({"name":"deaf","target":"pritu","kind":"block-incoming"})");
    CHECK(read_text(dir / "attacks.txt") == "deaf pritu all block-incoming\n");

    rig.call("POST", "/scenarios", R"({"name":"two","nodes":2,"topologies":3,"density":100,"maxdeg":1,"seed":2})");
    auto file = rig.json("GET", "/scenarios/two/file")["file"].get<std::string>();
    CHECK(read_text(dir / "scn" / "two.scn") == file);

    // Import of the saved file reproduces the same bytes.
    Rig other(Registry::load(read_text(dir / "nodes.txt")));
    auto r = other.call("POST", "/scenarios/import", Json{{"file", file}}.dump());
    CHECK(r.status == 201);
    CHECK(other.json("GET", "/scenarios/two/file")["file"] == file);
    fs::remove_all(dir);
}
