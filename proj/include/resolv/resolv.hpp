#pragma once

// Umbrella header for the resolvability toolkit.

#include "resolv/asymptotics.hpp"
#include "resolv/bounds.hpp"
#include "resolv/codes.hpp"
#include "resolv/distribution.hpp"
#include "resolv/errors.hpp"
#include "resolv/io.hpp"
#include "resolv/product.hpp"
#include "resolv/single_letter.hpp"
#include "resolv/spectrum.hpp"
#include "resolv/typicality.hpp"
