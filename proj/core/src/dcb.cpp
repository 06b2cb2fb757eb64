#include "mgrelay/dcb.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <random>
#include <tuple>

#include <fmt/format.h>

#include "mgrelay/errors.hpp"
#include "mgrelay/oracle.hpp"

namespace mgrelay::dcb {

Micros from_ms(double ms) {
    if (!std::isfinite(ms)) throw ValidationError("time must be finite");
    return Micros{static_cast<Micros::rep>(std::llround(ms * 1000.0))};
}

double to_ms(Micros t) { return static_cast<double>(t.count()) / 1000.0; }

std::string_view to_string(RelayId r) { return r == RelayId::A ? "A" : "B"; }

std::string_view to_string(EventKind k) {
    switch (k) {
    case EventKind::PickupFwd: return "PickupFwd";
    case EventKind::PickupRev: return "PickupRev";
    case EventKind::CarrierStart: return "CarrierStart";
    case EventKind::CarrierStop: return "CarrierStop";
    case EventKind::BlockReceived: return "BlockReceived";
    case EventKind::Trip: return "Trip";
    }
    return "?";
}

StepResult relay_step(const RelayState& state, const RelayInputs& in, Micros dt,
                      Micros coordination_time) {
    if (dt <= Micros{0}) throw ValidationError("relay step: dt must be positive");
    StepResult r{state, {}};
    RelayState& s = r.state;

    if (in.fwd && !s.forward_pickup) r.events.push_back(EventKind::PickupFwd);
    if (in.rev && !s.reverse_pickup) r.events.push_back(EventKind::PickupRev);
    s.forward_pickup = in.fwd;
    s.reverse_pickup = in.rev;

    if (in.rev != s.carrier_tx)
        r.events.push_back(in.rev ? EventKind::CarrierStart : EventKind::CarrierStop);
    s.carrier_tx = in.rev;

    if (in.block_rx && !s.block_rx) r.events.push_back(EventKind::BlockReceived);
    s.block_rx = in.block_rx;

    if (in.fwd && !in.block_rx)
        s.coordination_timer += dt;
    else
        s.coordination_timer = Micros{0};

    if (!s.tripped && s.coordination_timer >= coordination_time) {
        s.tripped = true;
        r.events.push_back(EventKind::Trip);
    }
    return r;
}

void DcbScenario::validate() const {
    if (step <= Micros{0}) throw ValidationError("dcb: step must be positive");
    if (duration < step) throw ValidationError("dcb: duration must be at least one step");
    if (channel.latency < Micros{0}) throw ValidationError("dcb: latency must be >= 0");
    if (!(channel.loss_probability >= 0.0 && channel.loss_probability <= 1.0))
        throw ValidationError("dcb: loss probability must lie in [0, 1]");
    for (const auto* r : {&relay_a, &relay_b})
        if (r->coordination_time <= Micros{0})
            throw ValidationError("dcb: coordination time must be positive");
    for (const auto& e : fault_script)
        if (e.time < Micros{0}) throw ValidationError("dcb: script times must be >= 0");
}

namespace {

struct Delivery {
    Micros arrival;
    std::size_t to;
    bool carrier_on;
};

bool event_less(const DcbEvent& x, const DcbEvent& y) {
    return std::tuple{x.time, x.relay, to_string(x.kind)} <
           std::tuple{y.time, y.relay, to_string(y.kind)};
}

} // namespace

std::vector<DcbEvent> simulate(const DcbScenario& s) {
    s.validate();

    std::vector<ScriptEntry> script = s.fault_script;
    std::stable_sort(script.begin(), script.end(),
                     [](const ScriptEntry& x, const ScriptEntry& y) { return x.time < y.time; });

    std::mt19937_64 rng(s.channel.seed);
    auto uniform = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };

    const std::array<RelayId, 2> ids{RelayId::A, RelayId::B};
    const std::array<Micros, 2> coordination{s.relay_a.coordination_time,
                                             s.relay_b.coordination_time};
    std::array<RelayState, 2> state{};
    std::array<RelayInputs, 2> in{};
    std::array<bool, 2> sent{false, false};
    std::deque<Delivery> channel;
    std::vector<DcbEvent> events;

    std::size_t next = 0;
    for (Micros t{0}; t < s.duration; t += s.step) {
        for (; next < script.size() && script[next].time <= t; ++next) {
            auto& i = in[script[next].relay == RelayId::A ? 0 : 1];
            i.fwd = script[next].fwd;
            i.rev = script[next].rev;
        }

        // Carrier transitions enter the channel before anything is delivered,
        // so a zero-latency block acts within the same step.
        for (std::size_t r = 0; r < 2; ++r) {
            if (in[r].rev == sent[r]) continue;
            sent[r] = in[r].rev;
            if (!s.channel.operational) continue;
            if (s.channel.loss_probability > 0.0 && uniform() < s.channel.loss_probability)
                continue;
            channel.push_back({t + s.channel.latency, 1 - r, in[r].rev});
        }
        std::stable_sort(channel.begin(), channel.end(),
                         [](const Delivery& x, const Delivery& y) { return x.arrival < y.arrival; });
        while (!channel.empty() && channel.front().arrival <= t) {
            in[channel.front().to].block_rx = channel.front().carrier_on;
            channel.pop_front();
        }

        for (std::size_t r = 0; r < 2; ++r) {
            StepResult res = relay_step(state[r], in[r], s.step, coordination[r]);
            state[r] = res.state;
            for (EventKind k : res.events)
                events.push_back({k == EventKind::Trip ? t + s.step : t, ids[r], k});
        }
    }

    std::stable_sort(events.begin(), events.end(), event_less);
    return events;
}

std::string format_trace(const std::vector<DcbEvent>& events) {
    std::string out = "time_ms,relay,kind\n";
    for (const auto& e : events) {
        const auto us = e.time.count();
        out += fmt::format("{}.{:03},{},{}\n", us / 1000, us % 1000, to_string(e.relay),
                           to_string(e.kind));
    }
    return out;
}

RelayOutcome outcome(const std::vector<DcbEvent>& events, RelayId relay) {
    RelayOutcome o;
    for (const auto& e : events) {
        if (e.relay != relay) continue;
        if (e.kind == EventKind::Trip) o.tripped = true;
        if (e.kind == EventKind::BlockReceived) o.blocked = true;
    }
    return o;
}

namespace {

std::pair<PhaseTriple, PhaseTriple> terminal_quantities(const oracle::NetworkSolution& n,
                                                        RelayTerminal t) {
    switch (t) {
    case RelayTerminal::SourceBus: return {n.v_source_bus, n.i_line_1m};
    case RelayTerminal::MidpointSourceSide: return {n.v_mid, n.i_line_1m};
    case RelayTerminal::MidpointLoadSide: return {n.v_mid, n.i_line_m2};
    case RelayTerminal::LoadBus: return {n.v_load_bus, Phasor{-1.0} * n.i_line_m2};
    }
    return {};
}

} // namespace

std::vector<ScriptEntry> couple_from_network(const MicrogridModel& m, RelayPlacement placement,
                                             Micros inception,
                                             const relaying::DirectionalSettings& ds) {
    if (m.fault.is_open()) return {};
    const oracle::NetworkSolution n = oracle::solve_phase_domain(m);
    const double line_angle = std::arg(m.line_1m.z1 + m.line_m2.z1);

    std::vector<ScriptEntry> script;
    const std::array<std::pair<RelayId, RelayTerminal>, 2> relays{
        std::pair{RelayId::A, placement.a}, std::pair{RelayId::B, placement.b}};
    for (const auto& [id, terminal] : relays) {
        const auto [v, i] = terminal_quantities(n, terminal);
        const auto d = relaying::directional_neg_seq(phase_to_sequence(v).neg,
                                                     phase_to_sequence(i).neg, line_angle, ds);
        if (d == relaying::DirectionalDecision::Indeterminate) continue;
        script.push_back({inception, id, d == relaying::DirectionalDecision::Forward,
                          d == relaying::DirectionalDecision::Reverse});
    }
    return script;
}

} // namespace mgrelay::dcb
