#include "simgap/wav.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <vector>

namespace simgap {

namespace {

std::uint32_t rd_u32(const unsigned char* p) {
    return std::uint32_t(p[0]) | std::uint32_t(p[1]) << 8 | std::uint32_t(p[2]) << 16 |
           std::uint32_t(p[3]) << 24;
}
std::uint16_t rd_u16(const unsigned char* p) {
    return std::uint16_t(p[0] | p[1] << 8);
}

void wr_u32(std::vector<unsigned char>& v, std::uint32_t x) {
    v.push_back(x & 0xff);
    v.push_back((x >> 8) & 0xff);
    v.push_back((x >> 16) & 0xff);
    v.push_back((x >> 24) & 0xff);
}
void wr_u16(std::vector<unsigned char>& v, std::uint16_t x) {
    v.push_back(x & 0xff);
    v.push_back((x >> 8) & 0xff);
}

}  // namespace

WavFile read_wav(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrKind::IoError, "cannot open " + path);
    std::vector<unsigned char> data((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    if (in.bad()) throw Error(ErrKind::IoError, "read failure on " + path);
    if (data.size() < 12 || std::memcmp(data.data(), "RIFF", 4) != 0 ||
        std::memcmp(data.data() + 8, "WAVE", 4) != 0)
        throw Error(ErrKind::UnsupportedFormat, "not a RIFF/WAVE file: " + path);

    bool have_fmt = false;
    std::uint16_t audio_format = 0, channels = 0, bits = 0;
    std::uint32_t sample_rate = 0;
    const unsigned char* pcm = nullptr;
    std::size_t pcm_bytes = 0;

    std::size_t pos = 12;
    while (pos + 8 <= data.size()) {
        const unsigned char* hdr = data.data() + pos;
        std::uint32_t chunk_size = rd_u32(hdr + 4);
        std::size_t body = pos + 8;
        if (body + chunk_size > data.size())
            throw Error(ErrKind::CorruptData, "truncated chunk in " + path);
        if (std::memcmp(hdr, "fmt ", 4) == 0) {
            if (chunk_size < 16) throw Error(ErrKind::CorruptData, "short fmt chunk");
            const unsigned char* f = data.data() + body;
            audio_format = rd_u16(f);
            channels = rd_u16(f + 2);
            sample_rate = rd_u32(f + 4);
            bits = rd_u16(f + 14);
            if (audio_format == 0xFFFE) {  // WAVE_FORMAT_EXTENSIBLE: codec in SubFormat
                if (chunk_size < 40) throw Error(ErrKind::CorruptData, "short extensible fmt");
                audio_format = rd_u16(f + 24);
            }
            have_fmt = true;
        } else if (std::memcmp(hdr, "data", 4) == 0) {
            pcm = data.data() + body;
            pcm_bytes = chunk_size;
        }
        pos = body + chunk_size + (chunk_size & 1);  // chunks are word-aligned
    }

    if (!have_fmt || pcm == nullptr)
        throw Error(ErrKind::CorruptData, "missing fmt or data chunk in " + path);
    if (channels < 1 || channels > 2)
        throw Error(ErrKind::UnsupportedFormat, "only 1-2 channels supported");
    if (sample_rate == 0) throw Error(ErrKind::InvalidRate, "zero sample rate");

    WavCodec codec;
    if (audio_format == 1 && bits == 16)
        codec = WavCodec::Pcm16;
    else if (audio_format == 1 && bits == 24)
        codec = WavCodec::Pcm24;
    else if (audio_format == 3 && bits == 32)
        codec = WavCodec::Float32;
    else
        throw Error(ErrKind::UnsupportedFormat,
                    "unsupported codec (format=" + std::to_string(audio_format) +
                        ", bits=" + std::to_string(bits) + ")");

    const std::size_t bytes_per = bits / 8;
    const std::size_t frame_bytes = bytes_per * channels;
    const std::size_t frames = pcm_bytes / frame_bytes;
    if (frames == 0) throw Error(ErrKind::EmptySignal, "file has no samples");

    std::vector<Eigen::VectorXd> chans(channels, Eigen::VectorXd(frames));
    for (std::size_t i = 0; i < frames; ++i) {
        for (int c = 0; c < channels; ++c) {
            const unsigned char* s = pcm + i * frame_bytes + c * bytes_per;
            double v = 0;
            switch (codec) {
                case WavCodec::Pcm16: {
                    std::int16_t x = static_cast<std::int16_t>(rd_u16(s));
                    v = x / 32768.0;
                    break;
                }
                case WavCodec::Pcm24: {
                    std::int32_t x = s[0] | (s[1] << 8) | (s[2] << 16);
                    if (x & 0x800000) x |= ~0xFFFFFF;  // sign extend
                    v = x / 8388608.0;
                    break;
                }
                case WavCodec::Float32: {
                    float f;
                    std::memcpy(&f, s, 4);
                    v = f;
                    break;
                }
            }
            chans[c](static_cast<Eigen::Index>(i)) = v;
        }
    }

    WavFile out;
    out.buffer = AudioBuffer(std::move(chans), static_cast<int>(sample_rate));
    out.format = {codec, static_cast<int>(sample_rate), channels};
    out.buffer.validate();
    return out;
}

void write_wav(const std::string& path, const AudioBuffer& buffer, const WavFormat& format) {
    buffer.validate();
    if (buffer.channel_count() != format.channels)
        throw Error(ErrKind::ParamMismatch, "format channel count does not match buffer");

    const int bits = format.codec == WavCodec::Pcm16 ? 16 : format.codec == WavCodec::Pcm24 ? 24 : 32;
    const int bytes_per = bits / 8;
    const std::size_t frames = static_cast<std::size_t>(buffer.length());
    const std::uint32_t data_bytes =
        static_cast<std::uint32_t>(frames * format.channels * bytes_per);

    std::vector<unsigned char> out;
    out.reserve(44 + data_bytes);
    out.insert(out.end(), {'R', 'I', 'F', 'F'});
    wr_u32(out, 36 + data_bytes);
    out.insert(out.end(), {'W', 'A', 'V', 'E', 'f', 'm', 't', ' '});
    wr_u32(out, 16);
    wr_u16(out, format.codec == WavCodec::Float32 ? 3 : 1);
    wr_u16(out, static_cast<std::uint16_t>(format.channels));
    wr_u32(out, static_cast<std::uint32_t>(format.sample_rate));
    wr_u32(out, static_cast<std::uint32_t>(format.sample_rate * format.channels * bytes_per));
    wr_u16(out, static_cast<std::uint16_t>(format.channels * bytes_per));
    wr_u16(out, static_cast<std::uint16_t>(bits));
    out.insert(out.end(), {'d', 'a', 't', 'a'});
    wr_u32(out, data_bytes);

    for (std::size_t i = 0; i < frames; ++i) {
        for (int c = 0; c < format.channels; ++c) {
            double v = buffer.channels[c](static_cast<Eigen::Index>(i));
            switch (format.codec) {
                case WavCodec::Pcm16: {
                    long x = std::lround(v * 32768.0);
                    x = std::clamp(x, -32768L, 32767L);
                    wr_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(x)));
                    break;
                }
                case WavCodec::Pcm24: {
                    long x = std::lround(v * 8388608.0);
                    x = std::clamp(x, -8388608L, 8388607L);
                    out.push_back(x & 0xff);
                    out.push_back((x >> 8) & 0xff);
                    out.push_back((x >> 16) & 0xff);
                    break;
                }
                case WavCodec::Float32: {
                    float f = static_cast<float>(v);
                    unsigned char b[4];
                    std::memcpy(b, &f, 4);
                    out.insert(out.end(), b, b + 4);
                    break;
                }
            }
        }
    }

    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw Error(ErrKind::IoError, "cannot open " + path + " for writing");
    os.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
    if (!os) throw Error(ErrKind::IoError, "write failure on " + path);
}

}  // namespace simgap
