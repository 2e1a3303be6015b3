#include "cosaref/wave.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

namespace cosaref {

float Waveform::peak() const {
    float p = 0.0f;
    for (const auto& ch : channels)
        for (float s : ch) p = std::max(p, std::abs(s));
    return p;
}

Waveform Waveform::to_mono() const {
    if (num_channels() <= 1) return *this;
    Waveform out(sample_rate, 1, length());
    const float scale = 1.0f / num_channels();
    for (const auto& ch : channels)
        for (size_t i = 0; i < ch.size(); ++i) out.channels[0][i] += ch[i] * scale;
    return out;
}

namespace {

uint32_t read_u32le(const uint8_t* p) {
    return p[0] | (uint32_t(p[1]) << 8) | (uint32_t(p[2]) << 16) | (uint32_t(p[3]) << 24);
}
uint16_t read_u16le(const uint8_t* p) { return p[0] | (uint16_t(p[1]) << 8); }

void put_u32le(std::vector<uint8_t>& v, uint32_t x) {
    v.push_back(x & 0xff);
    v.push_back((x >> 8) & 0xff);
    v.push_back((x >> 16) & 0xff);
    v.push_back((x >> 24) & 0xff);
}
void put_u16le(std::vector<uint8_t>& v, uint16_t x) {
    v.push_back(x & 0xff);
    v.push_back((x >> 8) & 0xff);
}

}  // namespace

Waveform wav_read(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw WavError("cannot open WAV file: " + path);
    std::vector<uint8_t> data((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    if (data.size() < 44 || std::memcmp(data.data(), "RIFF", 4) != 0 ||
        std::memcmp(data.data() + 8, "WAVE", 4) != 0)
        throw WavError("not a RIFF/WAVE file: " + path);

    uint16_t audio_format = 0, num_channels = 0, bits = 0;
    uint32_t sample_rate = 0;
    const uint8_t* pcm = nullptr;
    uint32_t pcm_bytes = 0;

    size_t pos = 12;
    while (pos + 8 <= data.size()) {
        const uint8_t* hdr = data.data() + pos;
        uint32_t chunk_size = read_u32le(hdr + 4);
        if (pos + 8 + chunk_size > data.size()) throw WavError("truncated WAV chunk: " + path);
        if (std::memcmp(hdr, "fmt ", 4) == 0) {
            if (chunk_size < 16) throw WavError("malformed fmt chunk: " + path);
            const uint8_t* p = hdr + 8;
            audio_format = read_u16le(p);
            num_channels = read_u16le(p + 2);
            sample_rate = read_u32le(p + 4);
            bits = read_u16le(p + 14);
        } else if (std::memcmp(hdr, "data", 4) == 0) {
            pcm = hdr + 8;
            pcm_bytes = chunk_size;
        }
        pos += 8 + chunk_size + (chunk_size & 1);
    }
    if (!pcm || num_channels == 0) throw WavError("missing fmt/data chunk: " + path);
    // 0xfffe = extensible; trust the bit depth.
    const bool is_float = (audio_format == 3) || (audio_format == 0xfffe && bits == 32);
    const bool is_pcm16 = (audio_format == 1 || audio_format == 0xfffe) && bits == 16;
    if (!is_float && !is_pcm16)
        throw WavError("unsupported WAV encoding (format " + std::to_string(audio_format) + ", " +
                       std::to_string(bits) + " bit): " + path);

    const size_t bytes_per_sample = bits / 8;
    const size_t frames = pcm_bytes / (bytes_per_sample * num_channels);
    Waveform wav(static_cast<int>(sample_rate), num_channels, frames);
    for (size_t i = 0; i < frames; ++i) {
        for (int c = 0; c < num_channels; ++c) {
            const uint8_t* p = pcm + (i * num_channels + c) * bytes_per_sample;
            if (is_float) {
                float v;
                std::memcpy(&v, p, 4);
                wav.channels[c][i] = v;
            } else {
                int16_t v = static_cast<int16_t>(read_u16le(p));
                wav.channels[c][i] = static_cast<float>(v) / 32768.0f;
            }
        }
    }
    return wav;
}

void wav_write(const std::string& path, const Waveform& wav, WavFormat format) {
    const int nch = std::max(1, wav.num_channels());
    const size_t frames = wav.length();
    const uint16_t bits = (format == WavFormat::Pcm16) ? 16 : 32;
    const uint16_t fmt_tag = (format == WavFormat::Pcm16) ? 1 : 3;
    const uint32_t byte_rate = wav.sample_rate * nch * bits / 8;
    const uint32_t data_bytes = static_cast<uint32_t>(frames * nch * bits / 8);

    std::vector<uint8_t> out;
    out.reserve(44 + data_bytes);
    out.insert(out.end(), {'R', 'I', 'F', 'F'});
    put_u32le(out, 36 + data_bytes);
    out.insert(out.end(), {'W', 'A', 'V', 'E', 'f', 'm', 't', ' '});
    put_u32le(out, 16);
    put_u16le(out, fmt_tag);
    put_u16le(out, static_cast<uint16_t>(nch));
    put_u32le(out, static_cast<uint32_t>(wav.sample_rate));
    put_u32le(out, byte_rate);
    put_u16le(out, static_cast<uint16_t>(nch * bits / 8));
    put_u16le(out, bits);
    out.insert(out.end(), {'d', 'a', 't', 'a'});
    put_u32le(out, data_bytes);

    for (size_t i = 0; i < frames; ++i) {
        for (int c = 0; c < nch; ++c) {
            float v = (c < wav.num_channels()) ? wav.channels[c][i] : 0.0f;
            if (format == WavFormat::Pcm16) {
                float clipped = std::clamp(v, -1.0f, 1.0f);
                int s = static_cast<int>(std::lround(clipped * 32767.0f));
                put_u16le(out, static_cast<uint16_t>(static_cast<int16_t>(s)));
            } else {
                uint8_t b[4];
                std::memcpy(b, &v, 4);
                out.insert(out.end(), b, b + 4);
            }
        }
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw WavError("cannot write WAV file: " + path);
    f.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
}

}  // namespace cosaref
