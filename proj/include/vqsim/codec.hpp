#ifndef VQSIM_CODEC_HPP_
#define VQSIM_CODEC_HPP_

#include <string>
#include <string_view>

namespace vqsim {

enum class Codec { kMpeg2, kDivx };

// Canonical config token ("MPEG2", "DIVX").
std::string_view codec_token(Codec codec);

// Human-facing name ("MPEG-2", "DivX").
std::string_view codec_name(Codec codec);

// Accepts the canonical token plus common spellings (case-insensitive,
// "mpeg-2", "mpeg4", "divx", ...). Throws std::invalid_argument otherwise.
Codec parse_codec(std::string_view text);

}  // namespace vqsim

#endif  // VQSIM_CODEC_HPP_
