#include <doctest.h>

#include "memsim/aer_mesh.hpp"
#include "memsim/rng.hpp"

#include <cmath>
#include <vector>

using namespace memsim;

namespace {

BoardSpec small_board(int rows, int cols, double e_pp = 1e8) {
    BoardSpec s;
    s.mesh_rows = rows;
    s.mesh_cols = cols;
    s.n_ch = static_cast<long long>(rows) * cols;
    s.e_pp_eps = e_pp;
    return s;
}

AddressEvent make_event(double t, int sr, int sc, int dr, int dc) {
    AddressEvent ev;
    ev.t_s = t;
    ev.src_r = sr;
    ev.src_c = sc;
    ev.dst_r = dr;
    ev.dst_c = dc;
    return ev;
}

} // namespace

TEST_CASE("board arithmetic: traffic and communication power") {
    CHECK(board_traffic(100.0, 1e8) == 4e10);
    CHECK(board_traffic(1.0, 1.0) == 4.0);
    CHECK_THROWS_AS(board_traffic(0.0, 1e8), std::invalid_argument);
    CHECK_THROWS_AS(board_traffic(100.0, 0.0), std::invalid_argument);

    BoardSpec spec;  // 100 chips, 1e6 neurons each, 40 mA at 10 Meps, 1..2 V
    auto p = comm_power(spec, 1.0);
    CHECK(p.per_chip_rate_eps == 1e6);
    CHECK(p.chip_current_A == 0.004);
    CHECK(p.chip_power_min_W == 0.004);
    CHECK(p.chip_power_max_W == 0.008);
    CHECK(p.board_power_min_W == 0.4);
    CHECK(p.board_power_max_W == 0.8);
    auto quiet = comm_power(spec, 0.0);
    CHECK(quiet.chip_current_A == 0.0);
    CHECK_THROWS_AS(comm_power(spec, -1.0), std::invalid_argument);
}

TEST_CASE("board validation ties the mesh shape to the chip count") {
    BoardSpec s;
    CHECK_NOTHROW(s.validate());
    s.mesh_rows = 9;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s = BoardSpec{};
    s.e_pp_eps = 0.0;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s = BoardSpec{};
    s.v_supply_max_V = 0.5;  // below the minimum supply
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}

TEST_CASE("from_config factors the chip count near square when unspecified") {
    auto cfg = Config::parse_string("[mesh]\nn_ch = 12\n");
    auto s = BoardSpec::from_config(cfg, "mesh");
    CHECK(s.mesh_rows == 3);
    CHECK(s.mesh_cols == 4);
    auto cfg2 = Config::parse_string("[mesh]\nn_ch = 10\nmesh_rows = 2\nmesh_cols = 5\n");
    auto s2 = BoardSpec::from_config(cfg2, "mesh");
    CHECK(s2.mesh_rows == 2);
    CHECK(s2.mesh_cols == 5);
    auto bad = Config::parse_string("[mesh]\nn_ch = 10\nmesh_rows = 3\nmesh_cols = 5\n");
    CHECK_THROWS_AS(BoardSpec::from_config(bad, "mesh"), std::invalid_argument);
    auto junk = Config::parse_string("[mesh]\nbandwidth = 1\n");
    CHECK_THROWS_AS(BoardSpec::from_config(junk, "mesh"), ConfigError);
}

TEST_CASE("an event for the local chip is delivered instantly") {
    MeshFabric fabric(small_board(2, 2));
    fabric.inject(make_event(1e-6, 0, 1, 0, 1));
    auto out = fabric.drain();
    REQUIRE(out.size() == 1);
    CHECK(out[0].t_deliver_s == 1e-6);
    auto st = fabric.stats();
    CHECK(st.delivered == 1);
    CHECK(st.mean_latency_s == 0.0);
    CHECK(st.max_latency_s == 0.0);
}

TEST_CASE("row-first routing crosses one link per hop at the service rate") {
    auto spec = small_board(3, 3);
    double s = 1.0 / spec.e_pp_eps;
    {
        MeshFabric fabric(spec);
        fabric.inject(make_event(0.0, 0, 0, 0, 2));  // two hops east
        auto out = fabric.drain();
        REQUIRE(out.size() == 1);
        CHECK(out[0].t_deliver_s == s + s);
    }
    {
        MeshFabric fabric(spec);
        fabric.inject(make_event(0.0, 0, 0, 2, 2));  // two south, then two east
        auto out = fabric.drain();
        REQUIRE(out.size() == 1);
        CHECK(out[0].t_deliver_s == ((s + s) + s) + s);
        CHECK(fabric.stats().max_latency_s == out[0].t_deliver_s);
    }
    {
        MeshFabric fabric(spec);
        fabric.inject(make_event(2e-9, 2, 1, 0, 1));  // two hops north
        auto out = fabric.drain();
        REQUIRE(out.size() == 1);
        CHECK(out[0].t_deliver_s == (2e-9 + s) + s);
    }
}

TEST_CASE("a shared link serializes coincident events in injection order") {
    auto spec = small_board(1, 2);
    double s = 1.0 / spec.e_pp_eps;
    MeshFabric fabric(spec);
    fabric.set_record_departures(true);
    const int k = 5;
    for (int i = 0; i < k; ++i) {
        auto ev = make_event(0.0, 0, 0, 0, 1);
        ev.src_n = i;
        fabric.inject(ev);
    }
    auto out = fabric.drain();
    REQUIRE(out.size() == k);
    double expect = 0.0;
    for (int i = 0; i < k; ++i) {
        expect += s;
        CHECK(out[i].ev.src_n == i);  // FIFO
        CHECK(out[i].t_deliver_s == expect);
    }
    auto st = fabric.stats();
    CHECK(st.max_queue == k);
    CHECK(st.max_link_util == 1.0);  // this link never idles
    // Departures on the east link out of chip 0 are spaced by the service time.
    const auto& deps = fabric.departures()[fabric.link_id(0, 0, 3)];
    REQUIRE(deps.size() == k);
    for (int i = 1; i < k; ++i) CHECK(deps[i] - deps[i - 1] >= s * (1.0 - 1e-9));
}

TEST_CASE("injections must respect time order and mesh bounds") {
    MeshFabric fabric(small_board(2, 2));
    CHECK_THROWS_AS(fabric.inject(make_event(0.0, 0, 0, 2, 0)), std::invalid_argument);
    CHECK_THROWS_AS(fabric.inject(make_event(0.0, -1, 0, 1, 1)), std::invalid_argument);
    fabric.inject(make_event(1e-6, 0, 0, 1, 1));
    CHECK_THROWS_AS(fabric.inject(make_event(0.5e-6, 0, 0, 1, 1)), std::invalid_argument);
    CHECK_NOTHROW(fabric.inject(make_event(1e-6, 0, 0, 1, 1)));
    std::vector<AddressEvent> unsorted = {make_event(1e-6, 0, 0, 1, 1),
                                          make_event(0.5e-6, 0, 0, 1, 1)};
    CHECK_THROWS_AS(route_events(small_board(2, 2), unsorted), std::invalid_argument);
}

TEST_CASE("advance releases deliveries up to the horizon and counts the rest") {
    auto spec = small_board(2, 2);
    double s = 1.0 / spec.e_pp_eps;
    MeshFabric fabric(spec);
    fabric.inject(make_event(0.0, 0, 0, 1, 1));  // delivered at 2s
    fabric.inject(make_event(0.0, 0, 0, 0, 1));  // delivered at s (different first link)
    CHECK(fabric.next_time_s() == 0.0);
    auto early = fabric.advance(1.5 * s);
    REQUIRE(early.size() == 1);
    CHECK(early[0].t_deliver_s == s);
    auto st = fabric.stats();
    CHECK(st.injected == 2);
    CHECK(st.delivered == 1);
    CHECK(st.in_flight == 1);
    auto late = fabric.drain();
    REQUIRE(late.size() == 1);
    st = fabric.stats();
    CHECK(st.delivered == 2);
    CHECK(st.in_flight == 0);
}

TEST_CASE("random traffic conserves events at every horizon") {
    auto spec = small_board(4, 4, 1e7);
    MeshFabric fabric(spec);
    SeedStream rng(17);
    double t = 0.0;
    const int n = 2000;
    for (int i = 0; i < n; ++i) {
        t += -std::log1p(-rng.uniform01()) / 2e6;
        int src = int(rng.uniform01() * 16.0);
        int dst = int(rng.uniform01() * 16.0);
        fabric.inject(make_event(t, src / 4, src % 4, dst / 4, dst % 4));
    }
    std::vector<double> horizons = {t * 0.25, t * 0.5, t * 0.75, t * 1.0001};
    long long seen = 0;
    for (double h : horizons) {
        seen += static_cast<long long>(fabric.advance(h).size());
        auto st = fabric.stats();
        CHECK(st.delivered == seen);
        CHECK(st.injected == n);
        CHECK(st.delivered + st.in_flight == st.injected);
    }
    seen += static_cast<long long>(fabric.drain().size());
    auto st = fabric.stats();
    CHECK(seen == n);
    CHECK(st.delivered == n);
    CHECK(st.in_flight == 0);
    CHECK(st.max_link_util <= 1.0 + 1e-12);
    CHECK(st.mean_latency_s > 0.0);
    CHECK(st.max_latency_s >= st.mean_latency_s);
}

TEST_CASE("identical traffic produces identical results") {
    auto spec = small_board(3, 3);
    std::vector<AddressEvent> events;
    SeedStream rng(23);
    double t = 0.0;
    for (int i = 0; i < 500; ++i) {
        t += rng.uniform01() * 1e-7;
        int src = int(rng.uniform01() * 9.0);
        int dst = int(rng.uniform01() * 9.0);
        events.push_back(make_event(t, src / 3, src % 3, dst / 3, dst % 3));
    }
    auto a = route_events(spec, events);
    auto b = route_events(spec, events);
    CHECK(a.delivered == b.delivered);
    CHECK(a.max_link_util == b.max_link_util);
    CHECK(a.mean_latency_s == b.mean_latency_s);
    CHECK(a.max_latency_s == b.max_latency_s);
    CHECK(a.max_queue == b.max_queue);
    CHECK(a.horizon_s == b.horizon_s);
}
