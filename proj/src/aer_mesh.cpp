#include "memsim/aer_mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace memsim {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

// directions: 0 = north (r-1), 1 = south (r+1), 2 = west (c-1), 3 = east (c+1)
constexpr int kDr[4] = {-1, 1, 0, 0};
constexpr int kDc[4] = {0, 0, -1, 1};
} // namespace

void BoardSpec::validate() const {
    if (n_ch < 1) throw std::invalid_argument("board: n_ch must be >= 1");
    if (mesh_rows < 1 || mesh_cols < 1 ||
        static_cast<long long>(mesh_rows) * mesh_cols != n_ch)
        throw std::invalid_argument("board: mesh_rows * mesh_cols must equal n_ch");
    if (!(e_pp_eps > 0.0)) throw std::invalid_argument("board: e_pp_eps must be > 0");
    if (!(rate_ref_eps > 0.0)) throw std::invalid_argument("board: rate_ref_eps must be > 0");
    if (!(neurons_per_chip >= 1.0))
        throw std::invalid_argument("board: neurons_per_chip must be >= 1");
    if (link_current_ref_A < 0.0)
        throw std::invalid_argument("board: link_current_ref_A must be >= 0");
    if (!(v_supply_min_V > 0.0) || !(v_supply_max_V >= v_supply_min_V))
        throw std::invalid_argument("board: need 0 < v_supply_min_V <= v_supply_max_V");
}

BoardSpec BoardSpec::from_config(const Config& cfg, const std::string& section) {
    BoardSpec s;
    cfg.require_known_keys(section,
                           {"n_ch", "mesh_rows", "mesh_cols", "e_pp_eps", "neurons_per_chip",
                            "link_current_ref_A", "rate_ref_eps", "v_supply_min_V",
                            "v_supply_max_V"});
    s.n_ch = cfg.get_int(section, "n_ch", s.n_ch);
    bool dims_given = cfg.has_key(section, "mesh_rows") || cfg.has_key(section, "mesh_cols");
    if (dims_given) {
        s.mesh_rows = static_cast<int>(cfg.get_int(section, "mesh_rows", 1));
        s.mesh_cols = static_cast<int>(cfg.get_int(section, "mesh_cols", 1));
    } else {
        // closest-to-square factorization
        int rows = static_cast<int>(std::sqrt(static_cast<double>(s.n_ch)));
        while (rows > 1 && s.n_ch % rows != 0) --rows;
        s.mesh_rows = rows;
        s.mesh_cols = static_cast<int>(s.n_ch / rows);
    }
    s.e_pp_eps = cfg.get_double(section, "e_pp_eps", s.e_pp_eps);
    s.neurons_per_chip = cfg.get_double(section, "neurons_per_chip", s.neurons_per_chip);
    s.link_current_ref_A = cfg.get_double(section, "link_current_ref_A", s.link_current_ref_A);
    s.rate_ref_eps = cfg.get_double(section, "rate_ref_eps", s.rate_ref_eps);
    s.v_supply_min_V = cfg.get_double(section, "v_supply_min_V", s.v_supply_min_V);
    s.v_supply_max_V = cfg.get_double(section, "v_supply_max_V", s.v_supply_max_V);
    s.validate();
    return s;
}

double board_traffic(double n_ch, double e_pp_eps) {
    if (!(n_ch > 0.0) || !(e_pp_eps > 0.0))
        throw std::invalid_argument("board_traffic: arguments must be > 0");
    return 4.0 * n_ch * e_pp_eps;
}

CommPower comm_power(const BoardSpec& spec, double avg_rate_hz) {
    if (avg_rate_hz < 0.0) throw std::invalid_argument("comm_power: rate must be >= 0");
    CommPower p;
    p.per_chip_rate_eps = spec.neurons_per_chip * avg_rate_hz;
    p.chip_current_A = spec.link_current_ref_A * p.per_chip_rate_eps / spec.rate_ref_eps;
    p.chip_power_min_W = p.chip_current_A * spec.v_supply_min_V;
    p.chip_power_max_W = p.chip_current_A * spec.v_supply_max_V;
    p.board_power_min_W = static_cast<double>(spec.n_ch) * p.chip_power_min_W;
    p.board_power_max_W = static_cast<double>(spec.n_ch) * p.chip_power_max_W;
    return p;
}

MeshFabric::MeshFabric(const BoardSpec& spec) : spec_(spec) {
    spec_.validate();
    service_s_ = 1.0 / spec_.e_pp_eps;
    std::size_t links = static_cast<std::size_t>(spec_.n_ch) * 4;
    next_free_.assign(links, 0.0);
    busy_s_.assign(links, 0.0);
    depth_.assign(links, 0);
    departures_.assign(links, {});
}

void MeshFabric::schedule(double t, int kind, int where, std::int64_t ev) {
    heap_.push_back(QEntry{t, seq_++, kind, where, ev});
    std::push_heap(heap_.begin(), heap_.end(), [](const QEntry& a, const QEntry& b) {
        return a.t > b.t || (a.t == b.t && a.seq > b.seq);
    });
}

void MeshFabric::inject(const AddressEvent& ev) {
    if (ev.src_r < 0 || ev.src_r >= spec_.mesh_rows || ev.src_c < 0 ||
        ev.src_c >= spec_.mesh_cols || ev.dst_r < 0 || ev.dst_r >= spec_.mesh_rows ||
        ev.dst_c < 0 || ev.dst_c >= spec_.mesh_cols)
        throw std::invalid_argument("mesh: event coordinates outside the mesh");
    if (ev.t_s < clock_ || (any_inject_ && ev.t_s < last_inject_))
        throw std::invalid_argument("mesh: injections must be in time order");
    if (!any_inject_) {
        first_inject_ = ev.t_s;
        any_inject_ = true;
    }
    last_inject_ = ev.t_s;
    ++injected_;
    active_.push_back(ActiveEv{ev, ev.t_s});
    schedule(ev.t_s, 1, ev.src_r * spec_.mesh_cols + ev.src_c,
             static_cast<std::int64_t>(active_.size()) - 1);
}

// Advance one in-transit event through the link leaving node q.where.
// Delivery at the destination is recognized by the caller.
void MeshFabric::handle_arrival(const QEntry& q) {
    ActiveEv& ae = active_[static_cast<std::size_t>(q.ev)];
    int r = q.where / spec_.mesh_cols;
    int c = q.where % spec_.mesh_cols;
    int dir;
    if (r != ae.ev.dst_r)
        dir = ae.ev.dst_r > r ? 1 : 0;
    else
        dir = ae.ev.dst_c > c ? 3 : 2;
    int link = link_id(r, c, dir);
    ++depth_[link];
    max_queue_ = std::max(max_queue_, depth_[link]);
    double depart = std::max(q.t, next_free_[link]) + service_s_;
    next_free_[link] = depart;
    busy_s_[link] += service_s_;
    if (record_departures_) departures_[static_cast<std::size_t>(link)].push_back(depart);
    schedule(depart, 0, link, -1);
    int nr = r + kDr[dir];
    int nc = c + kDc[dir];
    schedule(depart, 1, nr * spec_.mesh_cols + nc, q.ev);
}

void MeshFabric::process_until(double t_s, std::vector<Delivery>& out) {
    auto cmp = [](const QEntry& a, const QEntry& b) {
        return a.t > b.t || (a.t == b.t && a.seq > b.seq);
    };
    while (!heap_.empty() && heap_.front().t <= t_s) {
        std::pop_heap(heap_.begin(), heap_.end(), cmp);
        QEntry q = heap_.back();
        heap_.pop_back();
        clock_ = q.t;
        if (q.kind == 0) {
            --depth_[q.where];
            continue;
        }
        const ActiveEv& ae = active_[static_cast<std::size_t>(q.ev)];
        int r = q.where / spec_.mesh_cols;
        int c = q.where % spec_.mesh_cols;
        if (r == ae.ev.dst_r && c == ae.ev.dst_c) {
            ++delivered_;
            double lat = q.t - ae.t_inject;
            latency_sum_ += lat;
            latency_max_ = std::max(latency_max_, lat);
            out.push_back(Delivery{ae.ev, q.t});
        } else {
            handle_arrival(q);
        }
    }
    if (t_s > clock_ && t_s < kInf) clock_ = t_s;
}

std::vector<Delivery> MeshFabric::advance(double t_s) {
    std::vector<Delivery> out;
    process_until(t_s, out);
    return out;
}

std::vector<Delivery> MeshFabric::drain() { return advance(kInf); }

double MeshFabric::next_time_s() const { return heap_.empty() ? kInf : heap_.front().t; }

MeshStats MeshFabric::stats() const {
    MeshStats st;
    st.injected = injected_;
    st.delivered = delivered_;
    long long pending = 0;
    for (const QEntry& q : heap_)
        if (q.kind == 1) ++pending;
    st.in_flight = pending;
    st.horizon_s = clock_;
    double window = clock_ - first_inject_;
    if (any_inject_ && window > 0.0) {
        double peak = 0.0;
        for (double b : busy_s_) peak = std::max(peak, b);
        st.max_link_util = peak / window;
    }
    st.mean_latency_s = delivered_ > 0 ? latency_sum_ / static_cast<double>(delivered_) : 0.0;
    st.max_latency_s = latency_max_;
    st.max_queue = max_queue_;
    return st;
}

MeshStats route_events(const BoardSpec& spec, const std::vector<AddressEvent>& events) {
    MeshFabric fabric(spec);
    for (std::size_t k = 0; k < events.size(); ++k) {
        if (k > 0 && events[k].t_s < events[k - 1].t_s)
            throw std::invalid_argument("route_events: events must be time-sorted");
        fabric.inject(events[k]);
    }
    fabric.drain();
    return fabric.stats();
}

} // namespace memsim
