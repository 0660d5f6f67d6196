#pragma once

#include "matcrs/dist.hpp"
#include "matcrs/io.hpp"
#include "matcrs/lp.hpp"
#include "matcrs/matroid.hpp"
#include "matcrs/offline.hpp"
#include "matcrs/online.hpp"
#include "matcrs/prng.hpp"
#include "matcrs/rational.hpp"
#include "matcrs/subset.hpp"
