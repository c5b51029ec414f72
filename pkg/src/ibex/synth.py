"""Synthetic shop corpus with a known gold standard.

Entities are GTIN products (plus optional CAS chemicals) with unique names.
Each page uses one of three layouts:

* detail: one product, its name in a title-matching header before the id,
  the shop name as a competing header;
* list: several products, one ``li`` per product with the name in a header;
* table: one row per product.

Every page also carries 5-20 noise candidates drawn from a pool shared by
all entities, sometimes the name of an unrelated product, and filler text
padding the page to a target size.  The generator counts pages, id
occurrences and records so extraction counters can be checked exactly.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from . import corpus as corpus_mod
from .idspec import IdType, ValidatedId, cas_check_digit, gtin_check_digit, normalize_name, config_for
from .tsvio import write_gold

NOISE_POOL = [
    "Free Shipping on Orders", "Add to Shopping Cart", "Customer Reviews", "Special Offer Today",
    "Best Seller Ranking", "Write a Review", "Compare Similar Items", "Limited Time Deal",
    "Product Description", "Technical Details", "Frequently Bought Together", "Shipping Information",
    "Return Policy Details", "Gift Wrapping Available", "Secure Checkout", "In Stock Now",
    "Ships within Days", "Price Match Guarantee", "Related Products", "Recently Viewed Items",
    "Newsletter Signup", "Track Your Order", "Store Locator", "Customer Service Hours",
    "Warranty Information", "Accessories and Parts", "Clearance Sale Items", "Holiday Gift Guide",
    "Top Rated Products", "New Arrivals Weekly", "Bulk Order Discounts", "Member Rewards Program",
    "Express Delivery Options", "Payment Methods Accepted", "Size and Fit Guide", "Care Instructions",
    "Questions and Answers", "Share this Page", "Print this Page", "Email a Friend",
    "Safety Data Sheet", "Product Specifications", "Package Contents", "Energy Efficiency Class",
    "Manufacturer Website", "Availability Notice", "Order Tracking", "Loyalty Points Earned",
    "Customers Also Viewed", "Staff Picks Selection", "Seasonal Favorites", "Outlet Bargains",
    "Download the Manual", "Video Demonstration", "Installation Service", "Extended Protection Plan",
    "Pickup in Store", "Reserve Online", "Sustainability Report", "Quality Assurance",
]

BRANDS = [
    "Nikon", "Samsung", "Sony", "Philips", "Bosch", "Makita", "Canon", "Lego", "Braun", "Garmin",
    "Logitech", "Siemens", "Miele", "Olympus", "Pentax", "Rowenta", "Tefal", "Krups", "Dyson",
    "Brother", "Epson", "Kenwood", "Pioneer", "Yamaha", "Casio", "Seiko", "Victorinox", "Leica",
    "Zeiss", "Fujifilm", "Panasonic", "Toshiba", "Hitachi", "Sharp", "Denon", "Marantz", "Bose",
    "Sennheiser", "Jabra", "Rollei",
]
PRODUCT_WORDS = [
    "Camera", "Lens", "Charger", "Cable", "Adapter", "Speaker", "Headphones", "Blender", "Toaster",
    "Kettle", "Drill", "Saw", "Printer", "Scanner", "Monitor", "Keyboard", "Mouse", "Router",
    "Watch", "Tripod", "Flashlight", "Heater", "Fan", "Vacuum", "Iron", "Shaver", "Trimmer",
    "Projector", "Microphone", "Amplifier", "Receiver", "Turntable", "Radio", "Binoculars",
]
MODEL_WORDS = [
    "Coolpix", "Galaxy", "Alpha", "Sonic", "Turbo", "Ultra", "Pro", "Compact", "Classic", "Prime",
    "Vision", "Nova", "Aero", "Zen", "Fusion", "Pulse", "Edge", "Vivid", "Quantum", "Orbit",
]
CHEM_PREFIX = ["Methyl", "Ethyl", "Propyl", "Butyl", "Sodium", "Potassium", "Calcium", "Benzyl",
               "Phenyl", "Chloro", "Bromo", "Dimethyl", "Trimethyl", "Isopropyl", "Magnesium"]
CHEM_STEM = ["Acetate", "Benzoate", "Chloride", "Sulfate", "Nitrate", "Propionate", "Oxalate",
             "Citrate", "Formate", "Carbonate", "Phosphate", "Butyrate", "Lactate", "Tartrate"]
COUNTRY_PREFIXES = ["400", "401", "880", "450", "690", "500", "300", "800", "871", "750", "978", "761",
                    "040", "070", "089"]
SHOPS = [
    "Gadget Corner", "Mega Electronics", "Home Goods Depot", "Camera Palace", "Sound Warehouse",
    "Tool Central", "Kitchen World", "Office Supply Hub", "Tech Bargains", "Hobby Emporium",
    "Digital Street", "Appliance Outlet", "Photo Express", "Audio Haven", "Smart Living",
    "Chemical Supply House", "Lab Reagents Direct", "Global Chemicals", "Bright Store", "Value Mart",
]
FILLER = ("lorem ipsum dolor sit amet consectetur adipiscing elit sed do eiusmod tempor incididunt "
          "ut labore et dolore magna aliqua enim ad minim veniam quis nostrud exercitation ullamco "
          "laboris nisi aliquip ex ea commodo consequat duis aute irure in reprehenderit voluptate "
          "velit esse cillum fugiat nulla pariatur excepteur sint occaecat cupidatat non proident").split()


@dataclass
class Entity:
    id: ValidatedId
    name: str
    brand: str = ""


@dataclass
class GroundTruth:
    pages: int = 0
    ids: int = 0
    records: int = 0
    by_type: dict = field(default_factory=dict)

    def add(self, t: IdType, ids: int) -> None:
        d = self.by_type.setdefault(t, {"pages": 0, "ids": 0, "records": 0})
        d["ids"] += ids
        d["records"] += ids  # each id sits in its own subtree, so one record per occurrence
        if ids:
            d["pages"] += 1


@dataclass
class SynthPage:
    url: str
    html: str


@dataclass
class SynthCorpus:
    pages: list
    entities: list
    truth: GroundTruth

    def gold(self, t: "IdType | str") -> dict:
        t = IdType.parse(t)
        return {e.id: e.name for e in self.entities if e.id.id_type is t}


def _gtin(rng: random.Random, company: str) -> ValidatedId:
    body = company + "".join(rng.choice("0123456789") for _ in range(12 - len(company)))
    data = "0" + body
    return ValidatedId(IdType.GTIN, data + str(gtin_check_digit(data)))


def _cas(rng: random.Random) -> ValidatedId:
    first = str(rng.randint(50, 9999999))
    second = "%02d" % rng.randint(0, 99)
    return ValidatedId(IdType.CAS, f"{first}-{second}-{cas_check_digit(first + second)}")


def make_entities(rng: random.Random, n_gtin: int, n_cas: int = 0) -> list[Entity]:
    companies = {}
    for brand in BRANDS:
        companies[brand] = rng.choice(COUNTRY_PREFIXES) + "%04d" % rng.randint(0, 9999)
    taken = {normalize_name(x, config_for(IdType.GTIN)) for x in NOISE_POOL + SHOPS}
    ids: set = set()
    out: list[Entity] = []
    while len(out) < n_gtin:
        brand = rng.choice(BRANDS)
        letters = "".join(rng.choice("ABCDEFGHKLMNPRSTVWXZ") for _ in range(rng.randint(1, 3)))
        name = f"{brand} {rng.choice(MODEL_WORDS)} {letters}{rng.randint(10, 999)} {rng.choice(PRODUCT_WORDS)}"
        norm = normalize_name(name, config_for(IdType.GTIN))
        vid = _gtin(rng, companies[brand])
        if norm in taken or vid in ids:
            continue
        taken.add(norm)
        ids.add(vid)
        out.append(Entity(vid, name, brand))
    cas_taken = {normalize_name(x, config_for(IdType.CAS)) for x in NOISE_POOL + SHOPS}
    while len(out) < n_gtin + n_cas:
        name = f"{rng.choice(CHEM_PREFIX)} {rng.choice(CHEM_STEM)} Grade {rng.choice('ABCDEFGHKLMN')}{rng.randint(1, 99)}"
        norm = normalize_name(name, config_for(IdType.CAS))
        vid = _cas(rng)
        if norm in cas_taken or vid in ids:
            continue
        cas_taken.add(norm)
        ids.add(vid)
        out.append(Entity(vid, name))
    return out


def _paragraph(rng: random.Random) -> str:
    words = " ".join(rng.choice(FILLER) for _ in range(rng.randint(40, 90)))
    return f'<p class="text">{words} <a href="/info/{rng.randint(1, 999)}">read more</a></p>\n'


class _PageBuilder:
    def __init__(self, rng: random.Random, entities: list, variant_rate: float, cross_rate: float):
        self.rng = rng
        self.entities = entities
        self.variant_rate = variant_rate
        self.cross_rate = cross_rate
        self.paragraphs = [_paragraph(rng) for _ in range(256)]

    def filler(self, size: int) -> str:
        parts = []
        total = 0
        while total < size:
            para = self.rng.choice(self.paragraphs)
            parts.append(para)
            total += len(para)
        return "".join(parts)

    def name_of(self, e: Entity) -> str:
        if self.rng.random() < self.variant_rate:
            return e.name + " " + self.rng.choice(["New", "Bundle", "Refurbished", "Kit", "Deluxe"])
        return e.name

    def noise(self, k: int) -> list[str]:
        return [self.rng.choice(NOISE_POOL) for _ in range(k)]

    def other_name(self, e: Entity) -> str:
        o = self.rng.choice(self.entities)
        return o.name if o is not e else self.rng.choice(NOISE_POOL)

    def sidebar(self, labels: list[str]) -> str:
        items = "".join(f'<li><a href="/n/{i}">{t}</a></li>' for i, t in enumerate(labels))
        return f'<div class="sidebar"><ul>{items}</ul></div>\n'

    def frame(self, title: str, shop: str, main: str, noise: list[str], size: int) -> str:
        pad = self.filler(max(0, size - len(main) - 600))
        return (f"<!DOCTYPE html>\n<html><head><meta charset=\"utf-8\"><title>{title}</title>"
                f"<style>body {{ font: 12px sans-serif }}</style></head>\n<body>\n"
                f'<div class="top"><span class="logo">{shop}</span></div>\n'
                f'<div class="main">\n{main}</div>\n{self.sidebar(noise)}'
                f'<div class="footer">\n{pad}</div>\n'
                f"<script>var x = '<h1>not a header</h1>';</script>\n</body></html>\n")

    def detail(self, e: Entity, shop: str, size: int) -> str:
        name = self.name_of(e)
        n = self.rng.randint(5, 20)
        noise = self.noise(n)
        before = "".join(f"<h3>{t}</h3>\n" for t in noise[:2])
        after = "".join(f"<h2>{t}</h2>\n<p>{self.other_name(e)}</p>\n" for t in noise[2:4])
        main = (f"<h1>{shop}</h1>\n{before}<h1>{name}</h1>\n"
                f"<p>Item number: <b>{e.id.canonical.lstrip('0') if e.id.id_type is IdType.GTIN else e.id.canonical}</b></p>\n"
                f"{after}")
        return self.frame(f"{name} | {shop}", shop, main, noise[4:], size)

    def _listing_item(self, e: Entity, noise: list[str]) -> str:
        name = self.name_of(e)
        extra = noise[0] if noise else ""
        if self.rng.random() < self.cross_rate:
            extra = self.other_name(e)
        return (f'<li class="item"><h2><a href="/p/{e.id.canonical}">{name}</a></h2>'
                f'<span class="code">{e.id.canonical}</span> <small>{extra}</small>'
                f'<div class="buy">Add to cart</div></li>\n')

    def listing(self, es: list[Entity], shop: str, size: int) -> str:
        n = self.rng.randint(5, 20)
        noise = self.noise(n)
        items = "".join(self._listing_item(e, noise[i:i + 1]) for i, e in enumerate(es))
        main = f"<h1>{noise[-1]}</h1>\n<ul class=\"products\">\n{items}</ul>\n"
        return self.frame(f"{shop} catalogue", shop, main, noise[len(es):-1], size)

    def table(self, es: list[Entity], shop: str, size: int) -> str:
        n = self.rng.randint(5, 20)
        noise = self.noise(n)
        rows = "".join(
            f"<tr><td>{self.name_of(e)}</td><td>{e.id.canonical}</td><td>{noise[i % len(noise)]}</td></tr>\n"
            for i, e in enumerate(es))
        main = (f"<h2>{noise[-1]}</h2>\n<table>\n<tr><th>Product</th><th>Code</th><th>Notes</th></tr>\n"
                f"{rows}</table>\n")
        return self.frame(f"{shop} price list", shop, main, noise[:-1], size)


def generate(n_pages: int = 10000, n_entities: Optional[int] = None, cas_fraction: float = 0.1,
             seed: int = 0, page_bytes: int = 30000, variant_rate: float = 0.1,
             cross_rate: float = 0.05) -> SynthCorpus:
    """Build ``n_pages`` pages over roughly n_pages/3 entities."""
    rng = random.Random(seed)
    if n_entities is None:
        n_entities = max(2, n_pages // 3)
    n_cas = int(n_entities * cas_fraction)
    entities = make_entities(rng, n_entities - n_cas, n_cas)
    by_type: dict = {}
    for e in entities:
        by_type.setdefault(e.id.id_type, []).append(e)
    builder = _PageBuilder(rng, entities, variant_rate, cross_rate)
    truth = GroundTruth()
    pages = []
    for k in range(n_pages):
        shop = rng.choice(SHOPS)
        host = shop.lower().replace(" ", "-") + ".example"
        size = int(page_bytes * rng.uniform(0.5, 1.5))
        pool = entities
        layout = rng.random()
        if layout < 0.5:
            es = [rng.choice(pool)]
            html = builder.detail(es[0], shop, size)
        else:
            pool = by_type[rng.choice(list(by_type))] if len(by_type) > 1 and rng.random() < 0.5 else by_type[IdType.GTIN]
            es = rng.sample(pool, min(len(pool), rng.randint(2, 6)))
            html = builder.listing(es, shop, size) if layout < 0.8 else builder.table(es, shop, size)
        truth.pages += 1
        truth.ids += len(es)
        truth.records += len(es)
        for t in by_type:
            truth.add(t, sum(1 for e in es if e.id.id_type is t))
        pages.append(SynthPage(f"http://{host}/page/{k}", html))
    return SynthCorpus(pages, entities, truth)


def write_corpus(c: SynthCorpus, outdir: "str | Path", fmt: str = "warc") -> Path:
    """Write pages as ``corpus.warc.gz`` (per-record gzip) or an html tree, plus gold files."""
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    if fmt == "warc":
        target = out / "corpus.warc.gz"
        corpus_mod.write_warc(target, (corpus_mod.response_record(p.url, p.html.encode("utf-8"))
                                       for p in c.pages), compress="record", level=1)
    elif fmt == "dir":
        target = out / "pages"
        target.mkdir(exist_ok=True)
        lines = []
        for k, p in enumerate(c.pages):
            rel = f"{k // 1000:03d}/{k:06d}.html"
            (target / rel).parent.mkdir(exist_ok=True)
            (target / rel).write_text(p.html, "utf-8")
            lines.append(f"{rel}\t{p.url}\n")
        (out / "manifest.tsv").write_text("".join(lines), "utf-8")
    else:
        raise ValueError(f"unknown format {fmt!r}")
    for t in {e.id.id_type for e in c.entities}:
        with open(out / f"gold.{t.value}.tsv", "w", encoding="utf-8") as f:
            write_gold(f, c.gold(t))
    return target
