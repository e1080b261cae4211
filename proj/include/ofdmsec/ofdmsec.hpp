#pragma once

#include "attack.hpp"
#include "channel.hpp"
#include "equalizer.hpp"
#include "fft.hpp"
#include "harness.hpp"
#include "io.hpp"
#include "keystream.hpp"
#include "modem.hpp"
#include "permcipher.hpp"
#include "report.hpp"
#include "rng.hpp"
