#ifndef CAUSALABS_VERSION_HPP
#define CAUSALABS_VERSION_HPP

namespace causalabs {

const char* version();

}  // namespace causalabs

#endif  // CAUSALABS_VERSION_HPP
