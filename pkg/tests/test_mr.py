import pytest
from hypothesis import given, strategies as st

from mraug.errors import MRSyntaxError
from mraug.mr import (
    DelexMR, DialogAct, MeaningRepresentation, SlotValuePair, UtterancePair,
    delexicalize, delexicalize_utterance, format_pair, iter_pairs, parse_mr,
    read_pairs, serialize_mr, write_pairs,
)


def test_parse_single_act():
    mr = parse_mr("inform (food = chinese ; price = cheap)")
    assert mr.acts == (DialogAct("inform", (SlotValuePair("food", "chinese"), SlotValuePair("price", "cheap"))),)


def test_parse_compound_with_none_act():
    mr = parse_mr("inform(day=sunday; id=tr5413; arriveby=00:04 ) @ book (none)")
    assert [a.intent for a in mr.acts] == ["inform", "book"]
    assert [(s.key, s.value) for s in mr.acts[0].slots] == [
        ("day", "sunday"), ("id", "tr5413"), ("arriveby", "00:04")]
    assert mr.acts[1].slots == ()


def test_parse_empty_parens():
    assert parse_mr("greet()") == MeaningRepresentation((DialogAct("greet"),))


def test_parse_lowercases_intent_and_keys_but_not_values():
    mr = parse_mr("Confirm( Near = Chicago )")
    assert mr.acts[0].intent == "confirm"
    assert mr.slots[0] == SlotValuePair("near", "Chicago")


def test_values_may_contain_spaces_and_equals():
    mr = parse_mr("inform(name=tecra proteus 23;formula=a=b)")
    assert mr.slots[0].value == "tecra proteus 23"
    assert mr.slots[1].value == "a=b"


@pytest.mark.parametrize("text,offset", [
    ("", 0),
    ("   ", 3),
    ("inform(food=chinese", 19),
    ("(food=chinese)", 0),
    ("inform(food)", 7),
    ("inform(food=chinese))", 20),
    ("inform(food=)", 7),
    ("inform(a=b;)", 11),
    ("inform(a=b) book(none)", 12),
])
def test_syntax_errors_carry_byte_offset(text, offset):
    with pytest.raises(MRSyntaxError) as err:
        parse_mr(text)
    assert err.value.offset == offset
    assert isinstance(err.value, SyntaxError)


def test_offset_is_in_bytes_not_characters():
    with pytest.raises(MRSyntaxError) as err:
        parse_mr("inform(café=x;bad)")
    # "inform(café=x;" is 14 characters but 15 bytes
    assert err.value.offset == 15


def test_serialize_canonical():
    assert serialize_mr(MeaningRepresentation.single("inform", [("food", "chinese")])) == "inform(food=chinese)"
    assert serialize_mr(MeaningRepresentation.single("book")) == "book(none)"
    assert serialize_mr(parse_mr("inform( a = x y ) @ book ( none )")) == "inform(a=x y) @ book(none)"


def test_invalid_fields_rejected():
    with pytest.raises(ValueError):
        SlotValuePair("fo od", "x")
    with pytest.raises(ValueError):
        SlotValuePair("food", "")
    with pytest.raises(ValueError):
        SlotValuePair("food", "a;b")
    with pytest.raises(ValueError):
        DialogAct("")
    with pytest.raises(ValueError):
        MeaningRepresentation(())


key_st = st.text(alphabet="abcdefghijklmnopqrstuvwxyz_0123456789", min_size=1, max_size=8).filter(lambda k: k != "none")
value_st = st.text(
    alphabet=st.characters(blacklist_characters=";()@\n\r", blacklist_categories=("Cs",)),
    min_size=1, max_size=12,
).map(str.strip).filter(lambda v: v and " & " not in v)
act_st = st.builds(
    lambda intent, slots: DialogAct(intent, tuple(SlotValuePair(k, v) for k, v in slots)),
    key_st, st.lists(st.tuples(key_st, value_st), max_size=4),
)
mr_st = st.lists(act_st, min_size=1, max_size=3).map(lambda acts: MeaningRepresentation(tuple(acts)))


@given(mr_st)
def test_round_trip(mr):
    assert parse_mr(serialize_mr(mr)) == mr


@given(mr_st)
def test_delex_round_trips_through_its_serialization(mr):
    d = delexicalize(mr)
    assert DelexMR.parse(str(d)) == d
    assert delexicalize(parse_mr(serialize_mr(mr))) == d


def test_delexicalize():
    assert str(delexicalize(parse_mr("inform(food=chinese;price=cheap)"))) == "inform(food;price)"
    assert delexicalize(parse_mr("inform(food=chinese)")) == delexicalize(parse_mr("inform(food=indian)"))
    assert delexicalize(parse_mr("inform(food=chinese)")) != delexicalize(parse_mr("request(food=chinese)"))
    assert delexicalize(parse_mr("inform(a=1;b=2)")) == delexicalize(parse_mr("inform(b=3;a=4)"))
    assert str(delexicalize(parse_mr("book(none)"))) == "book(none)"


def _pair(mr, text):
    return UtterancePair(parse_mr(mr), text)


@pytest.mark.parametrize("mr,text,expected", [
    ("inform(food=chinese)", "i want chinese food", "i want [FOOD] food"),
    ("inform(near=Chicago)", "We love food in Chicago", "We love food in [NEAR]"),
    ("inform(area=north)", "no match here", "no match here"),
    ("inform(near=chicago)", "CHICAGO is great", "[NEAR] is great"),
    # longest value wins over a value nested inside it
    ("inform(city=york;near=new york)", "new york or york", "[NEAR] or [CITY]"),
    ("inform(area=north)", "northern lights in the north", "northern lights in the [AREA]"),
    ("inform(food=thai;area=north)", "thai food north thai", "[FOOD] food [AREA] [FOOD]"),
])
def test_delexicalize_utterance(mr, text, expected):
    assert delexicalize_utterance(_pair(mr, text)) == expected


@given(mr_st, st.text(alphabet="xyz ", max_size=20))
def test_delexicalize_utterance_noop_without_values(mr, text):
    if any(s.value.lower() in text.lower() for s in mr.slots):
        return
    assert delexicalize_utterance(UtterancePair(mr, text)) == text


def test_pairs_file_round_trip(tmp_path):
    pairs = [
        _pair("inform(food=chinese;price=cheap)", "a cheap chinese place"),
        _pair("inform(day=sunday) @ book(none)", "booked for sunday & more"),
    ]
    path = tmp_path / "pairs.txt"
    write_pairs(path, pairs)
    assert path.read_text(encoding="utf-8").splitlines()[0] == "inform(food=chinese;price=cheap) & a cheap chinese place"
    assert read_pairs(path) == pairs


def test_pairs_file_skips_comments_and_blank_lines():
    lines = ["# header", "", "greet(none) & hello"]
    assert list(iter_pairs(lines)) == [_pair("greet()", "hello")]


def test_format_pair_rejects_newline():
    with pytest.raises(ValueError):
        format_pair(_pair("greet()", "a\nb"))
