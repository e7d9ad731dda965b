import random

from sentmt.dialect import LABEL_DA, LABEL_MSA, LabeledSentence


def pytest_runtest_logreport(report):
    """One visible PASS/FAIL line per acceptance criterion."""
    if report.when != "call" or "test_acceptance" not in report.nodeid:
        return
    status = "PASS" if report.passed else "FAIL"
    name = report.nodeid.split("::")[-1]
    print(f"\n[ACCEPTANCE] {status}: {name}", flush=True)

# Disjoint marker-word inventories for the synthetic DA/MSA corpus. The
# separation is by construction; no claim about real-world dialect use.
DA_MARKERS = [
    "مش", "عايز", "كده", "ازاي",
    "ليه", "فين", "امتى",
    "دلوقتي", "بتاع", "اوي",
    "خالص", "يلا", "معلش",
    "برضه", "لسه", "جوه",
    "بره", "النهارده",
    "امبارح", "ده",
]
MSA_MARKERS = [
    "ليس", "أريد", "هكذا",
    "كيف", "لماذا", "أين",
    "متى", "الآن", "الخاص",
    "جدا", "تماما", "هيا",
    "عفوا", "أيضا", "بعد",
    "داخل", "خارج", "اليوم",
    "أمس", "هناك",
]
SHARED_FILLERS = [
    "الكتاب", "الفيلم",
    "الطعام", "المكان",
    "الناس", "العمل",
    "البيت", "الوقت",
    "الحياة", "الاسعار",
    "الخدمة", "الجو",
    "الفكرة", "القصة",
    "النهاية", "البداية",
    "الموضوع", "الكلام",
    "جميل", "كبير", "صغير",
    "جديد", "قديم", "طويل",
    "قصير", "كثير",
]


def make_synth_corpus(n=2000, seed=123):
    """Synthetic labeled DA/MSA sentences from disjoint marker inventories."""
    rng = random.Random(seed)
    corpus = []
    for i in range(n):
        label = LABEL_DA if i % 2 == 0 else LABEL_MSA
        markers = DA_MARKERS if label == LABEL_DA else MSA_MARKERS
        words = rng.choices(markers, k=rng.randint(2, 4))
        words += rng.choices(SHARED_FILLERS, k=rng.randint(3, 7))
        rng.shuffle(words)
        corpus.append(LabeledSentence(" ".join(words), label))
    return corpus
