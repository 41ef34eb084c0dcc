#pragma once

// Word-level phonetic encoders and the sentence-level phonetic similarity.
//
// The classic encoders are defined over A-Z. Tokens are prepared by canonical
// decomposition with combining marks removed, uppercasing, and dropping every
// character outside A-Z ("ñandé" -> "NANDE", "mba'e" -> "MBAE").

#include <array>
#include <cstddef>
#include <initializer_list>
#include <string>
#include <string_view>
#include <utility>

#include "fuse/textsim.hpp"
#include "fuse/unicode.hpp"

namespace fuse {

enum class PhoneticScheme {
  kMetaphone,
  kDoubleMetaphonePrimary,
  kSoundexPlusDoubleMetaphone,
  kSoundexPlusMetaphone,
};

inline constexpr char kPhoneticSeparator = ' ';

inline std::string_view to_string(PhoneticScheme s) {
  switch (s) {
    case PhoneticScheme::kMetaphone: return "metaphone";
    case PhoneticScheme::kDoubleMetaphonePrimary: return "double-metaphone";
    case PhoneticScheme::kSoundexPlusDoubleMetaphone: return "soundex+double-metaphone";
    case PhoneticScheme::kSoundexPlusMetaphone: return "soundex+metaphone";
  }
  return "?";
}

inline PhoneticScheme parse_phonetic_scheme(std::string_view s) {
  for (auto k : {PhoneticScheme::kMetaphone, PhoneticScheme::kDoubleMetaphonePrimary,
                 PhoneticScheme::kSoundexPlusDoubleMetaphone, PhoneticScheme::kSoundexPlusMetaphone}) {
    if (to_string(k) == s) return k;
  }
  throw UsageError("unknown phonetic scheme: " + std::string(s));
}

// Uppercase A-Z letters of the token after stripping diacritics.
inline std::string phonetic_letters(std::string_view token) {
  std::string out;
  for (char c : unicode::strip_marks(token)) {
    if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
    if (c >= 'A' && c <= 'Z') out.push_back(c);
  }
  return out;
}

// American Soundex: first letter plus three digits.
inline std::string soundex(std::string_view token) {
  static constexpr std::array<char, 26> kClass = {
      // A    B    C    D    E    F    G    H    I    J    K    L    M
      '0', '1', '2', '3', '0', '1', '2', 'h', '0', '2', '2', '4', '5',
      // N    O    P    Q    R    S    T    U    V    W    X    Y    Z
      '5', '0', '1', '2', '6', '2', '3', '0', '1', 'h', '2', '0', '2'};
  const std::string w = phonetic_letters(token);
  if (w.empty()) return {};
  std::string code(1, w[0]);
  char last = kClass[w[0] - 'A'];
  for (size_t i = 1; i < w.size() && code.size() < 4; ++i) {
    const char d = kClass[w[i] - 'A'];
    if (d == 'h') continue;  // H and W do not separate equal codes
    if (d != '0' && d != last) code.push_back(d);
    last = d;
  }
  code.resize(4, '0');
  return code;
}

// Metaphone, following the 1990 rule list:
//   - adjacent duplicate letters collapse, except C
//   - initial KN GN PN AE WR drop their first letter; initial X is S; initial WH is W
//   - vowels are kept only in first position
//   - B is silent in a final MB
//   - C: X before IA or H (K in SCH), S before I E Y (silent in SCI SCE SCY), else K
//   - D: J before GE GY GI (the G is consumed), else T
//   - G: silent before an H that is neither final nor before a vowel; silent in a
//     final GN or GNED; J before I E Y; else K
//   - H: silent after C G P S T, silent after a vowel when no vowel follows, else H
//   - K silent after C; PH is F; Q is K; V is F; Z is S; X is KS
//   - S: X before H, IO, IA
//   - T: X before IA, IO; TH is 0 (zero); silent before CH
//   - W and Y are kept only before a vowel (an initial WH keeps its W)
inline std::string metaphone(std::string_view token) {
  std::string w;
  for (char c : phonetic_letters(token)) {
    if (!w.empty() && w.back() == c && c != 'C') continue;
    w.push_back(c);
  }
  if (w.empty()) return {};

  bool initial_wh = false;
  const std::string_view head = std::string_view(w).substr(0, 2);
  if (head == "KN" || head == "GN" || head == "PN" || head == "AE" || head == "WR") {
    w.erase(0, 1);
  } else if (w[0] == 'X') {
    w[0] = 'S';
  } else if (head == "WH") {
    w.erase(1, 1);
    initial_wh = true;
  }

  const auto n = static_cast<std::ptrdiff_t>(w.size());
  auto at = [&](std::ptrdiff_t i) { return i >= 0 && i < n ? w[static_cast<size_t>(i)] : '\0'; };
  auto vowel = [](char c) { return c == 'A' || c == 'E' || c == 'I' || c == 'O' || c == 'U'; };
  auto front = [](char c) { return c == 'E' || c == 'I' || c == 'Y'; };

  std::string code;
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const char c = at(i), prev = at(i - 1), next = at(i + 1), after = at(i + 2);
    switch (c) {
      case 'A': case 'E': case 'I': case 'O': case 'U':
        if (i == 0) code.push_back(c);
        break;
      case 'B':
        if (!(prev == 'M' && i == n - 1)) code.push_back('B');
        break;
      case 'C':
        if (next == 'I' && after == 'A') {
          code.push_back('X');
        } else if (next == 'H') {
          code.push_back(prev == 'S' ? 'K' : 'X');
        } else if (front(next)) {
          if (prev != 'S') code.push_back('S');
        } else {
          code.push_back('K');
        }
        break;
      case 'D':
        if (next == 'G' && front(after)) {
          code.push_back('J');
          ++i;
        } else {
          code.push_back('T');
        }
        break;
      case 'G':
        if (next == 'H' && i + 2 < n && !vowel(after)) break;
        if (next == 'N' && (i + 2 == n || (i + 4 == n && after == 'E' && at(i + 3) == 'D'))) break;
        code.push_back(front(next) && prev != 'G' ? 'J' : 'K');
        break;
      case 'H':
        if (prev == 'C' || prev == 'G' || prev == 'P' || prev == 'S' || prev == 'T') break;
        if (vowel(prev) && !vowel(next)) break;
        code.push_back('H');
        break;
      case 'K':
        if (prev != 'C') code.push_back('K');
        break;
      case 'P':
        code.push_back(next == 'H' ? 'F' : 'P');
        break;
      case 'Q':
        code.push_back('K');
        break;
      case 'S':
        code.push_back(next == 'H' || (next == 'I' && (after == 'O' || after == 'A')) ? 'X' : 'S');
        break;
      case 'T':
        if (next == 'I' && (after == 'A' || after == 'O')) {
          code.push_back('X');
        } else if (next == 'H') {
          code.push_back('0');
        } else if (!(next == 'C' && after == 'H')) {
          code.push_back('T');
        }
        break;
      case 'V':
        code.push_back('F');
        break;
      case 'W':
        if (vowel(next) || (i == 0 && initial_wh)) code.push_back('W');
        break;
      case 'X':
        code += "KS";
        break;
      case 'Y':
        if (vowel(next)) code.push_back('Y');
        break;
      case 'Z':
        code.push_back('S');
        break;
      default:
        code.push_back(c);
    }
  }
  return code;
}

struct DoubleMetaphoneCode {
  std::string primary;
  std::string alternate;
  friend bool operator==(const DoubleMetaphoneCode&, const DoubleMetaphoneCode&) = default;
};

namespace detail {

// Double Metaphone state. The word is padded with spaces so that lookahead past
// the end sees ' ', which several rules treat as a word boundary.
class DoubleMetaphoneEncoder {
 public:
  static constexpr size_t kMaxLength = 4;

  explicit DoubleMetaphoneEncoder(std::string word)
      : length_(static_cast<int>(word.size())), last_(length_ - 1), word_(std::move(word) + "     ") {
    slavo_germanic_ = word_.find('W') != std::string::npos || word_.find('K') != std::string::npos ||
                      word_.find("CZ") != std::string::npos || word_.find("WITZ") != std::string::npos;
  }

  DoubleMetaphoneCode encode();

 private:
  char at(int i) const { return i < 0 || i >= static_cast<int>(word_.size()) ? '\0' : word_[i]; }

  bool string_at(int start, int len, std::initializer_list<std::string_view> options) const {
    if (start < 0 || start + len > static_cast<int>(word_.size())) return false;
    const std::string_view piece = std::string_view(word_).substr(start, len);
    for (auto o : options) {
      if (o == piece) return true;
    }
    return false;
  }

  bool vowel(int i) const {
    if (i < 0 || i >= length_) return false;
    const char c = word_[i];
    return c == 'A' || c == 'E' || c == 'I' || c == 'O' || c == 'U' || c == 'Y';
  }

  void add(std::string_view both) { add(both, both); }
  void add(std::string_view primary, std::string_view alternate) {
    primary_ += primary;
    alternate_ += alternate;
  }

  int handle_c(int cur);
  int handle_g(int cur);
  int handle_j(int cur);
  int handle_l(int cur);
  int handle_s(int cur);
  int handle_t(int cur);
  int handle_w(int cur);

  int length_;
  int last_;
  std::string word_;
  bool slavo_germanic_ = false;
  std::string primary_;
  std::string alternate_;
};

inline int DoubleMetaphoneEncoder::handle_c(int cur) {
  // Germanic "ach" but not "bacher"/"macher" variants handled below.
  if (cur > 1 && !vowel(cur - 2) && string_at(cur - 1, 3, {"ACH"}) && at(cur + 2) != 'I' &&
      (at(cur + 2) != 'E' || string_at(cur - 2, 6, {"BACHER", "MACHER"}))) {
    add("K");
    return cur + 2;
  }
  if (cur == 0 && string_at(cur, 6, {"CAESAR"})) {
    add("S");
    return cur + 2;
  }
  if (string_at(cur, 4, {"CHIA"})) {
    add("K");
    return cur + 2;
  }
  if (string_at(cur, 2, {"CH"})) {
    if (cur > 0 && string_at(cur, 4, {"CHAE"})) {
      add("K", "X");
      return cur + 2;
    }
    // Greek roots: chemistry, chorus.
    if (cur == 0 &&
        (string_at(cur + 1, 5, {"HARAC", "HARIS"}) || string_at(cur + 1, 3, {"HOR", "HYM", "HIA", "HEM"})) &&
        !string_at(0, 5, {"CHORE"})) {
      add("K");
      return cur + 2;
    }
    if (string_at(0, 4, {"VAN ", "VON "}) || string_at(0, 3, {"SCH"}) ||
        string_at(cur - 2, 6, {"ORCHES", "ARCHIT", "ORCHID"}) || string_at(cur + 2, 1, {"T", "S"}) ||
        ((string_at(cur - 1, 1, {"A", "O", "U", "E"}) || cur == 0) &&
         string_at(cur + 2, 1, {"L", "R", "N", "M", "B", "H", "F", "V", "W", " "}))) {
      add("K");
    } else if (cur > 0) {
      if (string_at(0, 2, {"MC"})) {
        add("K");
      } else {
        add("X", "K");
      }
    } else {
      add("X");
    }
    return cur + 2;
  }
  if (string_at(cur, 2, {"CZ"}) && !string_at(cur - 2, 4, {"WICZ"})) {
    add("S", "X");
    return cur + 2;
  }
  if (string_at(cur + 1, 3, {"CIA"})) {
    add("X");
    return cur + 3;
  }
  if (string_at(cur, 2, {"CC"}) && !(cur == 1 && at(0) == 'M')) {
    if (string_at(cur + 2, 1, {"I", "E", "H"}) && !string_at(cur + 2, 2, {"HU"})) {
      if ((cur == 1 && at(cur - 1) == 'A') || string_at(cur - 1, 5, {"UCCEE", "UCCES"})) {
        add("KS");
      } else {
        add("X");
      }
      return cur + 3;
    }
    add("K");
    return cur + 2;
  }
  if (string_at(cur, 2, {"CK", "CG", "CQ"})) {
    add("K");
    return cur + 2;
  }
  if (string_at(cur, 2, {"CI", "CE", "CY"})) {
    if (string_at(cur, 3, {"CIO", "CIE", "CIA"})) {
      add("S", "X");
    } else {
      add("S");
    }
    return cur + 2;
  }
  add("K");
  if (string_at(cur + 1, 2, {" C", " Q", " G"})) return cur + 3;
  if (string_at(cur + 1, 1, {"C", "K", "Q"}) && !string_at(cur + 1, 2, {"CE", "CI"})) return cur + 2;
  return cur + 1;
}

inline int DoubleMetaphoneEncoder::handle_g(int cur) {
  if (at(cur + 1) == 'H') {
    if (cur > 0 && !vowel(cur - 1)) {
      add("K");
      return cur + 2;
    }
    if (cur == 0) {
      add(at(cur + 2) == 'I' ? "J" : "K");
      return cur + 2;
    }
    // Parker's rule: hugh, bough, broughton.
    if ((cur > 1 && string_at(cur - 2, 1, {"B", "H", "D"})) ||
        (cur > 2 && string_at(cur - 3, 1, {"B", "H", "D"})) || (cur > 3 && string_at(cur - 4, 1, {"B", "H"}))) {
      return cur + 2;
    }
    // laugh, cough, rough, tough.
    if (cur > 2 && at(cur - 1) == 'U' && string_at(cur - 3, 1, {"C", "G", "L", "R", "T"})) {
      add("F");
    } else if (cur > 0 && at(cur - 1) != 'I') {
      add("K");
    }
    return cur + 2;
  }
  if (at(cur + 1) == 'N') {
    if (cur == 1 && vowel(0) && !slavo_germanic_) {
      add("KN", "N");
    } else if (!string_at(cur + 2, 2, {"EY"}) && at(cur + 1) != 'Y' && !slavo_germanic_) {
      add("N", "KN");
    } else {
      add("KN");
    }
    return cur + 2;
  }
  if (string_at(cur + 1, 2, {"LI"}) && !slavo_germanic_) {
    add("KL", "L");
    return cur + 2;
  }
  if (cur == 0 && (at(cur + 1) == 'Y' || string_at(cur + 1, 2, {"ES", "EP", "EB", "EL", "EY", "IB", "IL", "IN",
                                                                 "IE", "EI", "ER"}))) {
    add("K", "J");
    return cur + 2;
  }
  if ((string_at(cur + 1, 2, {"ER"}) || at(cur + 1) == 'Y') && !string_at(0, 6, {"DANGER", "RANGER", "MANGER"}) &&
      !string_at(cur - 1, 1, {"E", "I"}) && !string_at(cur - 1, 3, {"RGY", "OGY"})) {
    add("K", "J");
    return cur + 2;
  }
  if (string_at(cur + 1, 1, {"E", "I", "Y"}) || string_at(cur - 1, 4, {"AGGI", "OGGI"})) {
    if (string_at(0, 4, {"VAN ", "VON "}) || string_at(0, 3, {"SCH"}) || string_at(cur + 1, 2, {"ET"})) {
      add("K");
    } else if (string_at(cur + 1, 4, {"IER "})) {
      add("J");
    } else {
      add("J", "K");
    }
    return cur + 2;
  }
  add("K");
  return at(cur + 1) == 'G' ? cur + 2 : cur + 1;
}

inline int DoubleMetaphoneEncoder::handle_j(int cur) {
  if (string_at(cur, 4, {"JOSE"}) || string_at(0, 4, {"SAN "})) {
    if ((cur == 0 && at(cur + 4) == ' ') || string_at(0, 4, {"SAN "})) {
      add("H");
    } else {
      add("J", "H");
    }
    return cur + 1;
  }
  if (cur == 0 && !string_at(cur, 4, {"JOSE"})) {
    add("J", "A");
  } else if (vowel(cur - 1) && !slavo_germanic_ && (at(cur + 1) == 'A' || at(cur + 1) == 'O')) {
    add("J", "H");
  } else if (cur == last_) {
    add("J", "");
  } else if (!string_at(cur + 1, 1, {"L", "T", "K", "S", "N", "M", "B", "Z"}) &&
             !string_at(cur - 1, 1, {"S", "K", "L"})) {
    add("J");
  }
  return at(cur + 1) == 'J' ? cur + 2 : cur + 1;
}

inline int DoubleMetaphoneEncoder::handle_l(int cur) {
  if (at(cur + 1) == 'L') {
    // Spanish: cabrillo, gallegos.
    if ((cur == length_ - 3 && string_at(cur - 1, 4, {"ILLO", "ILLA", "ALLE"})) ||
        ((string_at(last_ - 1, 2, {"AS", "OS"}) || string_at(last_, 1, {"A", "O"})) &&
         string_at(cur - 1, 4, {"ALLE"}))) {
      add("L", "");
      return cur + 2;
    }
    add("L");
    return cur + 2;
  }
  add("L");
  return cur + 1;
}

inline int DoubleMetaphoneEncoder::handle_s(int cur) {
  if (string_at(cur - 1, 3, {"ISL", "YSL"})) return cur + 1;
  if (cur == 0 && string_at(cur, 5, {"SUGAR"})) {
    add("X", "S");
    return cur + 1;
  }
  if (string_at(cur, 2, {"SH"})) {
    add(string_at(cur + 1, 4, {"HEIM", "HOEK", "HOLM", "HOLZ"}) ? "S" : "X");
    return cur + 2;
  }
  if (string_at(cur, 3, {"SIO", "SIA"}) || string_at(cur, 4, {"SIAN"})) {
    if (slavo_germanic_) {
      add("S");
    } else {
      add("S", "X");
    }
    return cur + 3;
  }
  if ((cur == 0 && string_at(cur + 1, 1, {"M", "N", "L", "W"})) || string_at(cur + 1, 1, {"Z"})) {
    add("S", "X");
    return string_at(cur + 1, 1, {"Z"}) ? cur + 2 : cur + 1;
  }
  if (string_at(cur, 2, {"SC"})) {
    if (at(cur + 2) == 'H') {
      if (string_at(cur + 3, 2, {"OO", "ER", "EN", "UY", "ED", "EM"})) {
        if (string_at(cur + 3, 2, {"ER", "EN"})) {
          add("X", "SK");
        } else {
          add("SK");
        }
        return cur + 3;
      }
      if (cur == 0 && !vowel(3) && at(3) != 'W') {
        add("X", "S");
      } else {
        add("X");
      }
      return cur + 3;
    }
    if (string_at(cur + 2, 1, {"I", "E", "Y"})) {
      add("S");
      return cur + 3;
    }
    add("SK");
    return cur + 3;
  }
  if (cur == last_ && string_at(cur - 2, 2, {"AI", "OI"})) {
    add("", "S");
  } else {
    add("S");
  }
  return string_at(cur + 1, 1, {"S", "Z"}) ? cur + 2 : cur + 1;
}

inline int DoubleMetaphoneEncoder::handle_t(int cur) {
  if (string_at(cur, 4, {"TION"})) {
    add("X");
    return cur + 3;
  }
  if (string_at(cur, 3, {"TIA", "TCH"})) {
    add("X");
    return cur + 3;
  }
  if (string_at(cur, 2, {"TH"}) || string_at(cur, 3, {"TTH"})) {
    if (string_at(cur + 2, 2, {"OM", "AM"}) || string_at(0, 4, {"VAN ", "VON "}) || string_at(0, 3, {"SCH"})) {
      add("T");
    } else {
      add("0", "T");
    }
    return cur + 2;
  }
  add("T");
  return string_at(cur + 1, 1, {"T", "D"}) ? cur + 2 : cur + 1;
}

inline int DoubleMetaphoneEncoder::handle_w(int cur) {
  if (string_at(cur, 2, {"WR"})) {
    add("R");
    return cur + 2;
  }
  if (cur == 0 && (vowel(cur + 1) || string_at(cur, 2, {"WH"}))) {
    // Wasserman/Vasserman, Uomo/Womo.
    if (vowel(cur + 1)) {
      add("A", "F");
    } else {
      add("A");
    }
  }
  if ((cur == last_ && vowel(cur - 1)) || string_at(cur - 1, 5, {"EWSKI", "EWSKY", "OWSKI", "OWSKY"}) ||
      string_at(0, 3, {"SCH"})) {
    add("", "F");
    return cur + 1;
  }
  if (string_at(cur, 4, {"WICZ", "WITZ"})) {
    add("TS", "FX");
    return cur + 4;
  }
  return cur + 1;
}

inline DoubleMetaphoneCode DoubleMetaphoneEncoder::encode() {
  if (length_ == 0) return {};
  int cur = string_at(0, 2, {"GN", "KN", "PN", "WR", "PS"}) ? 1 : 0;
  if (at(0) == 'X') {
    add("S");
    cur = 1;
  }
  while ((primary_.size() < kMaxLength || alternate_.size() < kMaxLength) && cur < length_) {
    const char c = at(cur);
    switch (c) {
      case 'A': case 'E': case 'I': case 'O': case 'U': case 'Y':
        if (cur == 0) add("A");
        ++cur;
        break;
      case 'B':
        add("P");
        cur += at(cur + 1) == 'B' ? 2 : 1;
        break;
      case 'C':
        cur = handle_c(cur);
        break;
      case 'D':
        if (string_at(cur, 2, {"DG"})) {
          if (string_at(cur + 2, 1, {"I", "E", "Y"})) {
            add("J");
            cur += 3;
          } else {
            add("TK");
            cur += 2;
          }
        } else {
          add("T");
          cur += string_at(cur, 2, {"DT", "DD"}) ? 2 : 1;
        }
        break;
      case 'F': case 'K': case 'N':
        add(std::string_view(&word_[cur], 1));
        cur += at(cur + 1) == c ? 2 : 1;
        break;
      case 'G':
        cur = handle_g(cur);
        break;
      case 'H':
        if ((cur == 0 || vowel(cur - 1)) && vowel(cur + 1)) {
          add("H");
          cur += 2;
        } else {
          ++cur;
        }
        break;
      case 'J':
        cur = handle_j(cur);
        break;
      case 'L':
        cur = handle_l(cur);
        break;
      case 'M':
        add("M");
        cur += (string_at(cur - 1, 3, {"UMB"}) && (cur + 1 == last_ || string_at(cur + 2, 2, {"ER"}))) ||
                       at(cur + 1) == 'M'
                   ? 2
                   : 1;
        break;
      case 'P':
        if (at(cur + 1) == 'H') {
          add("F");
          cur += 2;
        } else {
          add("P");
          cur += string_at(cur + 1, 1, {"P", "B"}) ? 2 : 1;
        }
        break;
      case 'Q':
        add("K");
        cur += at(cur + 1) == 'Q' ? 2 : 1;
        break;
      case 'R':
        // French final -IER, but not -MEIER/-MAIER.
        if (cur == last_ && !slavo_germanic_ && string_at(cur - 2, 2, {"IE"}) &&
            !string_at(cur - 4, 2, {"ME", "MA"})) {
          add("", "R");
        } else {
          add("R");
        }
        cur += at(cur + 1) == 'R' ? 2 : 1;
        break;
      case 'S':
        cur = handle_s(cur);
        break;
      case 'T':
        cur = handle_t(cur);
        break;
      case 'V':
        add("F");
        cur += at(cur + 1) == 'V' ? 2 : 1;
        break;
      case 'W':
        cur = handle_w(cur);
        break;
      case 'X':
        // French final -AUX, -EAUX, -OUX.
        if (!(cur == last_ && (string_at(cur - 3, 3, {"IAU", "EAU"}) || string_at(cur - 2, 2, {"AU", "OU"})))) {
          add("KS");
        }
        cur += string_at(cur + 1, 1, {"C", "X"}) ? 2 : 1;
        break;
      case 'Z':
        if (at(cur + 1) == 'H') {
          add("J");
          cur += 2;
          break;
        }
        if (string_at(cur + 1, 2, {"ZO", "ZI", "ZA"}) || (slavo_germanic_ && cur > 0 && at(cur - 1) != 'T')) {
          add("S", "TS");
        } else {
          add("S");
        }
        cur += at(cur + 1) == 'Z' ? 2 : 1;
        break;
      default:
        ++cur;
    }
  }
  if (primary_.size() > kMaxLength) primary_.resize(kMaxLength);
  if (alternate_.size() > kMaxLength) alternate_.resize(kMaxLength);
  // An empty alternate means there is no distinct alternate pronunciation.
  if (alternate_.empty()) alternate_ = primary_;
  return {primary_, alternate_};
}

}  // namespace detail

// Primary and alternate Double Metaphone codes, each capped at four characters.
// When no ambiguity rule fires the alternate equals the primary.
inline DoubleMetaphoneCode double_metaphone(std::string_view token) {
  return detail::DoubleMetaphoneEncoder(phonetic_letters(token)).encode();
}

inline std::string phonetic_code(std::string_view token, PhoneticScheme scheme) {
  switch (scheme) {
    case PhoneticScheme::kMetaphone: return metaphone(token);
    case PhoneticScheme::kDoubleMetaphonePrimary: return double_metaphone(token).primary;
    case PhoneticScheme::kSoundexPlusDoubleMetaphone: return soundex(token) + double_metaphone(token).primary;
    case PhoneticScheme::kSoundexPlusMetaphone: return soundex(token) + metaphone(token);
  }
  return {};
}

// Per-token codes joined by kPhoneticSeparator. Tokens with no encodable
// letters contribute nothing.
inline std::string phonetic_key(const NormalizedText& t, PhoneticScheme scheme) {
  std::string key;
  for (const auto& token : tokenize(t)) {
    std::string code = phonetic_code(token, scheme);
    if (code.empty()) continue;
    if (!key.empty()) key.push_back(kPhoneticSeparator);
    key += code;
  }
  return key;
}

// P(r,h): sequence ratio of the two phonetic keys.
inline double phonetic_similarity(const NormalizedText& r, const NormalizedText& h, PhoneticScheme scheme) {
  if (r == h) return 1.0;
  if (r.empty() || h.empty()) return 0.0;
  return sequence_ratio(phonetic_key(r, scheme), phonetic_key(h, scheme));
}

}  // namespace fuse
