#pragma once

#include <string>

#include "simgap/audio.hpp"

namespace simgap {

enum class WavCodec { Pcm16, Pcm24, Float32 };

/// On-disk format, kept so a processed file can be written back unchanged.
struct WavFormat {
    WavCodec codec = WavCodec::Pcm16;
    int sample_rate = 44100;
    int channels = 1;
};

struct WavFile {
    AudioBuffer buffer;
    WavFormat format;
};

// RIFF/WAVE reader for PCM16/PCM24/Float32, 1-2 channels. Integer samples are
// scaled by 1/2^(bits-1), so +32767 maps to 32767/32768.
WavFile read_wav(const std::string& path);

// Writes with the given format; integer codecs round to nearest and clamp at
// full scale (so a +1.0 input stores as the largest positive code).
void write_wav(const std::string& path, const AudioBuffer& buffer, const WavFormat& format);

}  // namespace simgap
