#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace cosaref {

struct MidiParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TempoEntry {
    int64_t tick = 0;
    uint32_t us_per_quarter = 500000;  // SMF default, 120 BPM
};

struct NoteEvent {
    int pitch = 60;      // 0..127
    int velocity = 100;  // 1..127
    double onset_s = 0.0;
    double offset_s = 0.0;  // > onset_s
    int channel = 0;        // 0..15
    int64_t onset_tick = 0;
    int64_t offset_tick = 0;
};

struct ControlEvent {
    int controller = 0;  // 64 = sustain, 11 = expression
    int value = 0;
    double time_s = 0.0;
    int channel = 0;
    int64_t tick = 0;
};

struct EventTrack {
    std::vector<NoteEvent> notes;        // sorted by onset
    std::vector<ControlEvent> controls;  // sorted by time
};

struct Score {
    int ticks_per_quarter = 480;
    std::vector<TempoEntry> tempo_map;  // sorted strictly by tick, non-empty
    std::vector<EventTrack> tracks;

    std::vector<NoteEvent> all_notes() const;
    double end_time_s() const;  // last note offset (0 for empty score)
};

/// Parse a Standard MIDI File (format 0 or 1). Throws MidiParseError on
/// malformed input; never reads out of bounds.
Score parse_smf(const std::vector<uint8_t>& bytes);
Score parse_smf_file(const std::string& path);

/// Serialize to a format-0 SMF. Inverse of parse_smf up to track merging.
std::vector<uint8_t> write_smf(const Score& score);
void write_smf_file(const std::string& path, const Score& score);

/// Piecewise-linear integration of the tempo map.
double ticks_to_seconds(const Score& score, int64_t tick);

/// Extend note offsets while the sustain pedal (CC64 >= 64) is held, up to
/// the pedal release or the next same-pitch onset on the same channel,
/// whichever is earlier. Identity on scores without CC64.
Score apply_sustain(const Score& score);

}  // namespace cosaref
