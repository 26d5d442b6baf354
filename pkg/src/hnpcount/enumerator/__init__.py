from hnpcount.enumerator.extension import (DecompositionData, GExtensionQ, decomposition_data, frobenius_at,
                                           local_groups_at)
from hnpcount.enumerator.modulus import conductor_bound, enumerate_by_modulus
from hnpcount.enumerator.search import (ExtensionSearch, conductor_series_identity, count, count_characters,
                                        delsarte_count, enumerate_extensions, find_extension)
