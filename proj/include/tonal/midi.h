/**
 * @file midi.h
 * @brief Minimal Standard MIDI File support: note extraction on read, block
 *        chord rendering on write.
 */
#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace tonal::midi {

struct Note {
  int pitch = 60;
  double start = 0.0;  ///< quarter notes
  double end = 0.0;    ///< quarter notes
  int channel = 0;
};

struct Sequence {
  std::vector<Note> notes;  ///< sorted by start, then pitch
  int time_sig_numerator = 4;
  int time_sig_denominator = 4;
};

/// Parses format 0 or 1 files with PPQ timing. Throws InputError on
/// malformed data.
Sequence parse(std::span<const std::uint8_t> bytes);
Sequence read_file(const std::filesystem::path& path);

/// Format 0 file: one block chord per beat, each a list of MIDI pitches.
std::vector<std::uint8_t> render_block_chords(std::span<const std::vector<int>> chords, double bpm = 100.0,
                                              int ticks_per_quarter = 480);

}  // namespace tonal::midi
