"""Surface features: hashtags, mentions, emojis, word count — pure regex work.

Run: python3 demos/02_surface_extraction.py
"""

from tonecap import extract_surface

captions = [
    "I seriously can’t believe how close that car came to hitting me today! 😱 Some drivers… #CyclistLife",
    "email me a#b @Bob🚗🚙",
    "Family crossing 👨‍👩‍👧 slow down",
    "Press 1️⃣ to report #A1_north incidents to @city_hall",
    "Warning ⚠️ icy patches near the overpass",
    "",
]

for caption in captions:
    s = extract_surface(caption)
    print(f"caption : {caption!r}")
    print(f"  words={s.word_count} hashtags={list(s.hashtags)} "
          f"mentions={list(s.mentions)} emojis={list(s.emojis)}")
    print()
