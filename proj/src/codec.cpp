#include "vqsim/codec.hpp"

#include <stdexcept>

#include "vqsim/text.hpp"

namespace vqsim {

std::string_view codec_token(Codec codec) {
  return codec == Codec::kMpeg2 ? "MPEG2" : "DIVX";
}

std::string_view codec_name(Codec codec) {
  return codec == Codec::kMpeg2 ? "MPEG-2" : "DivX";
}

Codec parse_codec(std::string_view text) {
  std::string t = to_lower(text);
  if (t == "mpeg2" || t == "mpeg-2") {
    return Codec::kMpeg2;
  }
  if (t == "divx" || t == "mpeg4" || t == "mpeg-4") {
    return Codec::kDivx;
  }
  throw std::invalid_argument("unknown codec: '" + std::string(text) + "'");
}

}  // namespace vqsim
