#pragma once

namespace fixtures {

inline const char* kMnistSum = R"(
// two digit images, one shared classifier applied to each
rel digit1(int).
rel digit2(int).
rel sum2(int).
nn(img_a, 0)::digit1(0); nn(img_a, 1)::digit1(1); nn(img_a, 2)::digit1(2); nn(img_a, 3)::digit1(3);
  nn(img_a, 4)::digit1(4); nn(img_a, 5)::digit1(5); nn(img_a, 6)::digit1(6); nn(img_a, 7)::digit1(7);
  nn(img_a, 8)::digit1(8); nn(img_a, 9)::digit1(9).
nn(img_b, 0)::digit2(0); nn(img_b, 1)::digit2(1); nn(img_b, 2)::digit2(2); nn(img_b, 3)::digit2(3);
  nn(img_b, 4)::digit2(4); nn(img_b, 5)::digit2(5); nn(img_b, 6)::digit2(6); nn(img_b, 7)::digit2(7);
  nn(img_b, 8)::digit2(8); nn(img_b, 9)::digit2(9).
sum2(C) :- digit1(A), digit2(B), C == A + B.
query sum2(S).
)";

}  // namespace fixtures
