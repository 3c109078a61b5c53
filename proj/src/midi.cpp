#include "tonal/midi.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <map>
#include <string>

#include "tonal/error.h"

namespace tonal::midi {

namespace {

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> data) : data_(data) {}

  bool done() const { return pos_ >= data_.size(); }
  std::size_t pos() const { return pos_; }

  std::uint8_t u8() {
    need(1);
    return data_[pos_++];
  }
  std::uint32_t be(int bytes) {
    std::uint32_t v = 0;
    for (int i = 0; i < bytes; ++i) v = (v << 8) | u8();
    return v;
  }
  std::uint32_t varlen() {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      const std::uint8_t b = u8();
      v = (v << 7) | (b & 0x7F);
      if (!(b & 0x80)) return v;
    }
    throw InputError("MIDI variable-length quantity too long");
  }
  std::span<const std::uint8_t> bytes(std::size_t n) {
    need(n);
    auto out = data_.subspan(pos_, n);
    pos_ += n;
    return out;
  }
  void skip(std::size_t n) { bytes(n); }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > data_.size()) throw InputError("truncated MIDI data");
  }
  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
};

void put_be(std::vector<std::uint8_t>& out, std::uint32_t v, int bytes) {
  for (int i = bytes - 1; i >= 0; --i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
}

void put_varlen(std::vector<std::uint8_t>& out, std::uint32_t v) {
  std::uint8_t buf[4];
  int n = 0;
  buf[n++] = v & 0x7F;
  while ((v >>= 7) != 0) buf[n++] = static_cast<std::uint8_t>((v & 0x7F) | 0x80);
  while (n > 0) out.push_back(buf[--n]);
}

}  // namespace

Sequence parse(std::span<const std::uint8_t> data) {
  Reader r(data);
  if (r.be(4) != 0x4D546864) throw InputError("not a Standard MIDI File (missing MThd)");
  const std::uint32_t header_len = r.be(4);
  if (header_len < 6) throw InputError("MIDI header too short");
  const auto format = r.be(2);
  const auto tracks = r.be(2);
  const auto division = r.be(2);
  r.skip(header_len - 6);
  if (format > 1) throw InputError("only MIDI formats 0 and 1 are supported");
  if (division & 0x8000) throw InputError("SMPTE-timed MIDI files are not supported");
  if (division == 0) throw InputError("MIDI division is zero");
  const double tpq = static_cast<double>(division);

  Sequence seq;
  bool have_time_sig = false;
  for (std::uint32_t t = 0; t < tracks; ++t) {
    if (r.done()) break;
    const std::uint32_t id = r.be(4);
    const std::uint32_t len = r.be(4);
    if (id != 0x4D54726B) {  // unknown chunk
      r.skip(len);
      --t;
      continue;
    }
    Reader tr(r.bytes(len));
    std::uint64_t tick = 0;
    std::uint8_t status = 0;
    std::map<std::pair<int, int>, std::vector<std::uint64_t>> open;  // (channel, pitch) -> onsets
    while (!tr.done()) {
      tick += tr.varlen();
      std::uint8_t b = tr.u8();
      if (b == 0xFF) {
        const std::uint8_t type = tr.u8();
        const auto meta = tr.bytes(tr.varlen());
        if (type == 0x58 && meta.size() >= 2 && !have_time_sig) {
          seq.time_sig_numerator = meta[0];
          seq.time_sig_denominator = 1 << meta[1];
          have_time_sig = true;
        } else if (type == 0x2F) {
          break;
        }
        continue;
      }
      if (b == 0xF0 || b == 0xF7) {
        tr.skip(tr.varlen());
        continue;
      }
      std::uint8_t first;
      if (b & 0x80) {
        status = b;
        first = tr.u8();
      } else {
        if (status == 0) throw InputError("MIDI running status without a status byte");
        first = b;
      }
      const int kind = status & 0xF0;
      const int channel = status & 0x0F;
      const bool two_bytes = kind != 0xC0 && kind != 0xD0;
      const std::uint8_t second = two_bytes ? tr.u8() : 0;
      const bool on = kind == 0x90 && second > 0;
      const bool off = kind == 0x80 || (kind == 0x90 && second == 0);
      if (on) {
        open[{channel, first}].push_back(tick);
      } else if (off) {
        auto it = open.find({channel, first});
        if (it == open.end() || it->second.empty()) continue;
        const std::uint64_t start = it->second.front();
        it->second.erase(it->second.begin());
        if (tick > start) {
          seq.notes.push_back({first, static_cast<double>(start) / tpq, static_cast<double>(tick) / tpq, channel});
        }
      }
    }
  }
  std::sort(seq.notes.begin(), seq.notes.end(), [](const Note& a, const Note& b) {
    return a.start != b.start ? a.start < b.start : a.pitch < b.pitch;
  });
  return seq;
}

Sequence read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse(bytes);
}

std::vector<std::uint8_t> render_block_chords(std::span<const std::vector<int>> chords, double bpm,
                                              int ticks_per_quarter) {
  std::vector<std::uint8_t> track;
  // tempo
  const auto usec = static_cast<std::uint32_t>(std::lround(60'000'000.0 / bpm));
  put_varlen(track, 0);
  track.insert(track.end(), {0xFF, 0x51, 0x03});
  put_be(track, usec, 3);
  // 4/4
  put_varlen(track, 0);
  track.insert(track.end(), {0xFF, 0x58, 0x04, 0x04, 0x02, 0x18, 0x08});

  std::uint32_t pending = 0;  // delta carried over an empty chord
  const auto beat = static_cast<std::uint32_t>(ticks_per_quarter);
  for (const auto& chord : chords) {
    if (chord.empty()) {
      pending += beat;
      continue;
    }
    for (int p : chord) {
      put_varlen(track, pending);
      pending = 0;
      track.insert(track.end(), {0x90, static_cast<std::uint8_t>(std::clamp(p, 0, 127)), 80});
    }
    bool first = true;
    for (int p : chord) {
      put_varlen(track, first ? beat : 0);
      track.insert(track.end(), {0x80, static_cast<std::uint8_t>(std::clamp(p, 0, 127)), 0});
      first = false;
    }
  }
  put_varlen(track, pending);
  track.insert(track.end(), {0xFF, 0x2F, 0x00});

  std::vector<std::uint8_t> out = {'M', 'T', 'h', 'd'};
  put_be(out, 6, 4);
  put_be(out, 0, 2);
  put_be(out, 1, 2);
  put_be(out, static_cast<std::uint32_t>(ticks_per_quarter), 2);
  out.insert(out.end(), {'M', 'T', 'r', 'k'});
  put_be(out, static_cast<std::uint32_t>(track.size()), 4);
  out.insert(out.end(), track.begin(), track.end());
  return out;
}

}  // namespace tonal::midi
