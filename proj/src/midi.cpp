#include "cosaref/midi.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <map>

namespace cosaref {

std::vector<NoteEvent> Score::all_notes() const {
    std::vector<NoteEvent> out;
    for (const auto& t : tracks) out.insert(out.end(), t.notes.begin(), t.notes.end());
    std::sort(out.begin(), out.end(), [](const NoteEvent& a, const NoteEvent& b) {
        if (a.onset_s != b.onset_s) return a.onset_s < b.onset_s;
        if (a.pitch != b.pitch) return a.pitch < b.pitch;
        return a.channel < b.channel;
    });
    return out;
}

double Score::end_time_s() const {
    double end = 0.0;
    for (const auto& t : tracks)
        for (const auto& n : t.notes) end = std::max(end, n.offset_s);
    return end;
}

namespace {

class ByteReader {
  public:
    ByteReader(const uint8_t* data, size_t size) : data_(data), size_(size) {}

    size_t pos() const { return pos_; }
    size_t remaining() const { return size_ - pos_; }

    uint8_t u8() {
        need(1);
        return data_[pos_++];
    }
    uint8_t peek() const {
        if (pos_ >= size_) throw MidiParseError("truncated chunk: unexpected end of data");
        return data_[pos_];
    }
    uint16_t u16be() {
        need(2);
        uint16_t v = (uint16_t(data_[pos_]) << 8) | data_[pos_ + 1];
        pos_ += 2;
        return v;
    }
    uint32_t u32be() {
        need(4);
        uint32_t v = (uint32_t(data_[pos_]) << 24) | (uint32_t(data_[pos_ + 1]) << 16) |
                     (uint32_t(data_[pos_ + 2]) << 8) | data_[pos_ + 3];
        pos_ += 4;
        return v;
    }
    uint32_t varlen() {
        uint32_t v = 0;
        for (int i = 0; i < 4; ++i) {
            uint8_t b = u8();
            v = (v << 7) | (b & 0x7f);
            if (!(b & 0x80)) return v;
        }
        throw MidiParseError("variable-length quantity longer than 4 bytes");
    }
    void skip(size_t n) {
        need(n);
        pos_ += n;
    }
    const uint8_t* raw(size_t n) {
        need(n);
        const uint8_t* p = data_ + pos_;
        pos_ += n;
        return p;
    }

  private:
    void need(size_t n) const {
        if (pos_ + n > size_) throw MidiParseError("truncated chunk: unexpected end of data");
    }
    const uint8_t* data_;
    size_t size_;
    size_t pos_ = 0;
};

struct OpenNote {
    int velocity;
    int64_t onset_tick;
};

struct RawTrack {
    // notes with tick positions only; seconds filled in later
    std::vector<NoteEvent> notes;
    std::vector<ControlEvent> controls;
};

RawTrack parse_track(ByteReader& r, size_t length, std::vector<TempoEntry>& tempo_map) {
    ByteReader tr(r.raw(length), length);
    RawTrack track;
    // one open note per (channel, pitch); a re-onset truncates the earlier note
    std::map<std::pair<int, int>, OpenNote> open;
    int64_t tick = 0;
    uint8_t running_status = 0;

    auto close_note = [&](int channel, int pitch, int64_t off_tick) {
        auto it = open.find({channel, pitch});
        if (it == open.end()) return;
        NoteEvent n;
        n.pitch = pitch;
        n.velocity = it->second.velocity;
        n.channel = channel;
        n.onset_tick = it->second.onset_tick;
        n.offset_tick = std::max(off_tick, n.onset_tick + 1);
        track.notes.push_back(n);
        open.erase(it);
    };

    while (tr.remaining() > 0) {
        tick += tr.varlen();
        uint8_t status = tr.peek();
        if (status & 0x80) {
            tr.u8();
            if (status < 0xf0) running_status = status;
        } else {
            if (running_status == 0) throw MidiParseError("data byte without running status");
            status = running_status;
        }

        if (status == 0xff) {  // meta event
            uint8_t type = tr.u8();
            uint32_t len = tr.varlen();
            const uint8_t* p = tr.raw(len);
            if (type == 0x51 && len == 3) {
                uint32_t uspq = (uint32_t(p[0]) << 16) | (uint32_t(p[1]) << 8) | p[2];
                tempo_map.push_back({tick, uspq});
            } else if (type == 0x2f) {
                break;  // end of track
            }
        } else if (status == 0xf0 || status == 0xf7) {  // sysex, skipped
            uint32_t len = tr.varlen();
            tr.skip(len);
        } else {
            const int channel = status & 0x0f;
            switch (status & 0xf0) {
                case 0x80: {  // note off
                    int pitch = tr.u8() & 0x7f;
                    tr.u8();  // release velocity ignored
                    close_note(channel, pitch, tick);
                    break;
                }
                case 0x90: {  // note on (velocity 0 = note off)
                    int pitch = tr.u8() & 0x7f;
                    int vel = tr.u8() & 0x7f;
                    if (vel == 0) {
                        close_note(channel, pitch, tick);
                    } else {
                        close_note(channel, pitch, tick);  // truncate overlapping same pitch
                        open[{channel, pitch}] = {vel, tick};
                    }
                    break;
                }
                case 0xb0: {  // control change
                    ControlEvent c;
                    c.controller = tr.u8() & 0x7f;
                    c.value = tr.u8() & 0x7f;
                    c.channel = channel;
                    c.tick = tick;
                    track.controls.push_back(c);
                    break;
                }
                case 0xa0:  // poly aftertouch
                case 0xe0:  // pitch bend
                    tr.skip(2);
                    break;
                case 0xc0:  // program change
                case 0xd0:  // channel aftertouch
                    tr.skip(1);
                    break;
                default:
                    throw MidiParseError("unexpected status byte");
            }
        }
    }
    // unpaired note-ons close at track end
    int64_t end_tick = tick;
    while (!open.empty()) {
        auto key = open.begin()->first;
        close_note(key.first, key.second, std::max(end_tick, open.begin()->second.onset_tick + 1));
    }
    std::sort(track.notes.begin(), track.notes.end(),
              [](const NoteEvent& a, const NoteEvent& b) { return a.onset_tick < b.onset_tick; });
    return track;
}

}  // namespace

Score parse_smf(const std::vector<uint8_t>& bytes) {
    ByteReader r(bytes.data(), bytes.size());
    if (r.remaining() < 14) throw MidiParseError("malformed header: file too short");
    const uint8_t* magic = r.raw(4);
    if (std::memcmp(magic, "MThd", 4) != 0) throw MidiParseError("malformed header: missing MThd");
    uint32_t hlen = r.u32be();
    if (hlen < 6) throw MidiParseError("malformed header: bad length");
    uint16_t format = r.u16be();
    uint16_t ntracks = r.u16be();
    uint16_t division = r.u16be();
    if (hlen > 6) r.skip(hlen - 6);
    if (format == 2) throw MidiParseError("unsupported format 2 SMF");
    if (format > 2) throw MidiParseError("malformed header: unknown format");
    if (division & 0x8000) throw MidiParseError("SMPTE time division not supported");
    if (division == 0) throw MidiParseError("malformed header: zero ticks per quarter");

    Score score;
    score.ticks_per_quarter = division;

    std::vector<RawTrack> raw_tracks;
    for (int t = 0; t < ntracks && r.remaining() > 0; ++t) {
        if (r.remaining() < 8) throw MidiParseError("truncated chunk: track header");
        const uint8_t* tmagic = r.raw(4);
        uint32_t tlen = r.u32be();
        if (std::memcmp(tmagic, "MTrk", 4) != 0) {
            if (tlen > r.remaining()) throw MidiParseError("truncated chunk: alien chunk length");
            r.skip(tlen);  // unknown chunk, skip per spec
            --t;
            continue;
        }
        if (tlen > r.remaining()) throw MidiParseError("truncated chunk: track data");
        raw_tracks.push_back(parse_track(r, tlen, score.tempo_map));
    }

    std::sort(score.tempo_map.begin(), score.tempo_map.end(),
              [](const TempoEntry& a, const TempoEntry& b) { return a.tick < b.tick; });
    // keep the last tempo at any given tick
    std::vector<TempoEntry> dedup;
    for (const auto& e : score.tempo_map) {
        if (!dedup.empty() && dedup.back().tick == e.tick)
            dedup.back() = e;
        else
            dedup.push_back(e);
    }
    score.tempo_map = std::move(dedup);
    if (score.tempo_map.empty() || score.tempo_map.front().tick != 0)
        score.tempo_map.insert(score.tempo_map.begin(), TempoEntry{0, 500000});

    for (auto& raw : raw_tracks) {
        EventTrack track;
        for (auto n : raw.notes) {
            n.onset_s = ticks_to_seconds(score, n.onset_tick);
            n.offset_s = ticks_to_seconds(score, n.offset_tick);
            track.notes.push_back(n);
        }
        for (auto c : raw.controls) {
            c.time_s = ticks_to_seconds(score, c.tick);
            track.controls.push_back(c);
        }
        score.tracks.push_back(std::move(track));
    }
    return score;
}

Score parse_smf_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw MidiParseError("cannot open MIDI file: " + path);
    std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    return parse_smf(bytes);
}

double ticks_to_seconds(const Score& score, int64_t tick) {
    double seconds = 0.0;
    const auto& map = score.tempo_map;
    for (size_t i = 0; i < map.size(); ++i) {
        const int64_t seg_start = map[i].tick;
        const int64_t seg_end = (i + 1 < map.size()) ? map[i + 1].tick : std::numeric_limits<int64_t>::max();
        if (tick <= seg_start) break;
        const int64_t ticks_in_seg = std::min(tick, seg_end) - seg_start;
        seconds += static_cast<double>(ticks_in_seg) * map[i].us_per_quarter /
                   (1e6 * score.ticks_per_quarter);
        if (tick <= seg_end) break;
    }
    return seconds;
}

namespace {

void put_varlen(std::vector<uint8_t>& out, uint32_t v) {
    uint8_t buf[4];
    int n = 0;
    do {
        buf[n++] = v & 0x7f;
        v >>= 7;
    } while (v > 0);
    for (int i = n - 1; i >= 0; --i) out.push_back(buf[i] | (i > 0 ? 0x80 : 0x00));
}

struct WireEvent {
    int64_t tick;
    int order;  // tempo < note-off < control < note-on at equal tick
    std::vector<uint8_t> bytes;
};

}  // namespace

std::vector<uint8_t> write_smf(const Score& score) {
    std::vector<WireEvent> events;
    for (const auto& e : score.tempo_map) {
        WireEvent w{e.tick, 0, {0xff, 0x51, 0x03}};
        w.bytes.push_back((e.us_per_quarter >> 16) & 0xff);
        w.bytes.push_back((e.us_per_quarter >> 8) & 0xff);
        w.bytes.push_back(e.us_per_quarter & 0xff);
        events.push_back(std::move(w));
    }
    for (const auto& t : score.tracks) {
        for (const auto& n : t.notes) {
            events.push_back({n.onset_tick,
                              3,
                              {uint8_t(0x90 | (n.channel & 0x0f)), uint8_t(n.pitch & 0x7f),
                               uint8_t(n.velocity & 0x7f)}});
            events.push_back(
                {n.offset_tick, 1, {uint8_t(0x80 | (n.channel & 0x0f)), uint8_t(n.pitch & 0x7f), 64}});
        }
        for (const auto& c : t.controls) {
            events.push_back({c.tick,
                              2,
                              {uint8_t(0xb0 | (c.channel & 0x0f)), uint8_t(c.controller & 0x7f),
                               uint8_t(c.value & 0x7f)}});
        }
    }
    std::stable_sort(events.begin(), events.end(), [](const WireEvent& a, const WireEvent& b) {
        if (a.tick != b.tick) return a.tick < b.tick;
        return a.order < b.order;
    });

    std::vector<uint8_t> track;
    int64_t last_tick = 0;
    for (const auto& e : events) {
        put_varlen(track, static_cast<uint32_t>(e.tick - last_tick));
        track.insert(track.end(), e.bytes.begin(), e.bytes.end());
        last_tick = e.tick;
    }
    put_varlen(track, 0);
    track.insert(track.end(), {0xff, 0x2f, 0x00});

    std::vector<uint8_t> out = {'M', 'T', 'h', 'd', 0, 0, 0, 6, 0, 0, 0, 1};
    out.push_back((score.ticks_per_quarter >> 8) & 0xff);
    out.push_back(score.ticks_per_quarter & 0xff);
    out.insert(out.end(), {'M', 'T', 'r', 'k'});
    uint32_t tlen = static_cast<uint32_t>(track.size());
    out.push_back((tlen >> 24) & 0xff);
    out.push_back((tlen >> 16) & 0xff);
    out.push_back((tlen >> 8) & 0xff);
    out.push_back(tlen & 0xff);
    out.insert(out.end(), track.begin(), track.end());
    return out;
}

void write_smf_file(const std::string& path, const Score& score) {
    auto bytes = write_smf(score);
    std::ofstream f(path, std::ios::binary);
    if (!f) throw MidiParseError("cannot write MIDI file: " + path);
    f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

Score apply_sustain(const Score& score) {
    Score out = score;
    for (auto& track : out.tracks) {
        // pedal hold intervals per channel, from CC64 transitions
        struct Hold {
            double down, up;
        };
        std::map<int, std::vector<Hold>> holds;
        for (int ch = 0; ch < 16; ++ch) {
            bool down = false;
            double down_t = 0.0;
            for (const auto& c : track.controls) {
                if (c.channel != ch || c.controller != 64) continue;
                if (c.value >= 64 && !down) {
                    down = true;
                    down_t = c.time_s;
                } else if (c.value < 64 && down) {
                    down = false;
                    holds[ch].push_back({down_t, c.time_s});
                }
            }
            if (down) holds[ch].push_back({down_t, std::numeric_limits<double>::infinity()});
        }
        if (holds.empty()) continue;
        for (auto& n : track.notes) {
            auto it = holds.find(n.channel);
            if (it == holds.end()) continue;
            for (const auto& h : it->second) {
                if (n.offset_s >= h.down && n.offset_s < h.up) {
                    double extended = h.up;
                    // re-onset of the same pitch ends the held note early
                    for (const auto& m : track.notes) {
                        if (m.channel == n.channel && m.pitch == n.pitch &&
                            m.onset_s > n.offset_s && m.onset_s < extended)
                            extended = m.onset_s;
                    }
                    if (std::isfinite(extended) && extended > n.offset_s) n.offset_s = extended;
                    break;
                }
            }
        }
    }
    return out;
}

}  // namespace cosaref
