#pragma once

#include "memsim/config.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace memsim {

struct BoardSpec {
    long long n_ch = 100;
    int mesh_rows = 10;
    int mesh_cols = 10;
    double e_pp_eps = 1e8;
    double neurons_per_chip = 1e6;
    double link_current_ref_A = 0.04;
    double rate_ref_eps = 1e7;
    double v_supply_min_V = 1.0;
    double v_supply_max_V = 2.0;

    void validate() const;
    static BoardSpec from_config(const Config& cfg, const std::string& section);
};

// Aggregate inter-chip traffic: four neighbor links per chip at e_pp each.
double board_traffic(double n_ch, double e_pp_eps);

struct CommPower {
    double per_chip_rate_eps = 0.0;
    double chip_current_A = 0.0;
    double chip_power_min_W = 0.0;
    double chip_power_max_W = 0.0;
    double board_power_min_W = 0.0;
    double board_power_max_W = 0.0;
};

// Link current scales linearly with the per-chip event rate from the
// reference point; the power band comes from the supply range.
CommPower comm_power(const BoardSpec& spec, double avg_rate_hz);

struct AddressEvent {
    double t_s = 0.0;
    int src_r = 0;
    int src_c = 0;
    long long src_n = 0;
    int dst_r = 0;
    int dst_c = 0;
    long long dst_n = 0;
};

struct Delivery {
    AddressEvent ev;
    double t_deliver_s = 0.0;
};

struct MeshStats {
    long long injected = 0;
    long long delivered = 0;
    long long in_flight = 0;
    double max_link_util = 0.0;
    double mean_latency_s = 0.0;
    double max_latency_s = 0.0;
    long long max_queue = 0;
    double horizon_s = 0.0;
};

// Dimension-order (row, then column) hop-by-hop transport over directed
// nearest-neighbor links, each serving one event per 1/e_pp with a FIFO.
// Single-threaded discrete-event loop, ties broken by insertion sequence.
class MeshFabric {
public:
    explicit MeshFabric(const BoardSpec& spec);

    void inject(const AddressEvent& ev);
    // Processes everything scheduled up to and including t_s and returns the
    // deliveries that completed in that span, in completion order.
    std::vector<Delivery> advance(double t_s);
    std::vector<Delivery> drain();
    double next_time_s() const;

    MeshStats stats() const;

    void set_record_departures(bool on) { record_departures_ = on; }
    // Per directed link id: departure instants, in order. Only filled while
    // recording is on.
    const std::vector<std::vector<double>>& departures() const { return departures_; }
    int link_id(int r, int c, int dir) const { return (r * spec_.mesh_cols + c) * 4 + dir; }
    int link_count() const { return static_cast<int>(next_free_.size()); }

private:
    struct QEntry {
        double t;
        std::uint64_t seq;
        int kind;  // 0 = leave a link queue, 1 = arrive at a node
        int where; // link id (kind 0) or node id (kind 1)
        std::int64_t ev;
    };
    struct ActiveEv {
        AddressEvent ev;
        double t_inject;
    };

    void schedule(double t, int kind, int where, std::int64_t ev);
    void handle_arrival(const QEntry& q);
    void process_until(double t_s, std::vector<Delivery>& out);

    BoardSpec spec_;
    double service_s_;
    std::vector<QEntry> heap_;
    std::uint64_t seq_ = 0;
    std::vector<ActiveEv> active_;
    std::vector<double> next_free_;
    std::vector<double> busy_s_;
    std::vector<long long> depth_;
    std::vector<std::vector<double>> departures_;
    bool record_departures_ = false;
    double clock_ = 0.0;
    double first_inject_ = 0.0;
    double last_inject_ = 0.0;
    bool any_inject_ = false;
    long long injected_ = 0;
    long long delivered_ = 0;
    long long max_queue_ = 0;
    double latency_sum_ = 0.0;
    double latency_max_ = 0.0;
};

// Convenience wrapper: inject a time-sorted batch, run to completion.
MeshStats route_events(const BoardSpec& spec, const std::vector<AddressEvent>& events);

} // namespace memsim
