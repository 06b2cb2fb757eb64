#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "mgrelay/netmodel.hpp"
#include "mgrelay/relaying.hpp"

namespace mgrelay::dcb {

/// Simulation clock. Millisecond settings are rounded to whole microseconds.
using Micros = std::chrono::microseconds;

Micros from_ms(double ms);
double to_ms(Micros t);

enum class RelayId { A, B };
enum class EventKind { PickupFwd, PickupRev, CarrierStart, CarrierStop, BlockReceived, Trip };

std::string_view to_string(RelayId r);
std::string_view to_string(EventKind k);

struct RelayState {
    bool forward_pickup = false;
    bool reverse_pickup = false;
    bool carrier_tx = false;
    bool block_rx = false;
    Micros coordination_timer{0};
    bool tripped = false;
};

struct RelayInputs {
    bool fwd = false;
    bool rev = false;
    bool block_rx = false;
};

/// New state plus the events raised during the step. Trip takes effect at the
/// end of the step, every other event at its start.
struct StepResult {
    RelayState state;
    std::vector<EventKind> events;
};

/// Advances one relay by dt. Inputs hold for the whole step: the timer grows
/// while fwd and no block, otherwise it resets. The trip latches.
StepResult relay_step(const RelayState& state, const RelayInputs& in, Micros dt,
                      Micros coordination_time);

struct ChannelModel {
    Micros latency{0};
    bool operational = true;
    double loss_probability = 0.0;
    std::uint64_t seed = 0;
};

struct RelaySettings {
    Micros coordination_time = from_ms(16.7);
};

/// Directional pickups of one relay from `time` on.
struct ScriptEntry {
    Micros time{0};
    RelayId relay = RelayId::A;
    bool fwd = false;
    bool rev = false;

    friend bool operator==(const ScriptEntry&, const ScriptEntry&) = default;
};

struct DcbScenario {
    RelaySettings relay_a{};
    RelaySettings relay_b{};
    ChannelModel channel{};
    std::vector<ScriptEntry> fault_script;
    Micros duration = from_ms(100.0);
    Micros step = from_ms(0.1);

    void validate() const;
};

struct DcbEvent {
    Micros time{0};
    RelayId relay = RelayId::A;
    EventKind kind = EventKind::PickupFwd;

    friend bool operator==(const DcbEvent&, const DcbEvent&) = default;
};

/// Fixed-step run of both relays and the blocking channel. Events come back
/// ordered by time, relay, then kind name.
std::vector<DcbEvent> simulate(const DcbScenario& s);

/// `time_ms,relay,kind` header plus one line per event.
std::string format_trace(const std::vector<DcbEvent>& events);

struct RelayOutcome {
    bool tripped = false;
    bool blocked = false;
};

RelayOutcome outcome(const std::vector<DcbEvent>& events, RelayId relay);

/// Where a relay measures: a bus voltage and the current through the segment
/// it looks into. Currents are oriented towards the relay's forward direction.
enum class RelayTerminal { SourceBus, MidpointSourceSide, MidpointLoadSide, LoadBus };

struct RelayPlacement {
    RelayTerminal a = RelayTerminal::MidpointSourceSide;
    RelayTerminal b = RelayTerminal::LoadBus;
};

/// Runs the oracle and the negative-sequence directional element at both
/// terminals; relays with a decision get a pickup at `inception`.
std::vector<ScriptEntry> couple_from_network(const MicrogridModel& m, RelayPlacement placement,
                                             Micros inception,
                                             const relaying::DirectionalSettings& ds = {});

} // namespace mgrelay::dcb
