"""Regenerate the data files bundled with cs_forge.

Writes, under src/cs_forge/data/:

    lexicon/ca.txt        Catalan word list (langid exclusive set)
    lexicon/es.txt        Spanish word list (langid exclusive set)
    lexicon/ngrams.tsv    character 2-/3-gram log-odds (positive = Catalan)
    pos/ca_pos.tsv        Catalan POS lexicon for the noun chunker
    dict/ca_es.tsv        ca→es word/phrase dictionary
    published_wer.jsonl   published WER matrix for the analysis helpers

Outputs are fully determined by the lists below: rerunning the script
reproduces the files byte for byte.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from pathlib import Path

DATA_DIR = Path(__file__).resolve().parent.parent / "src" / "cs_forge" / "data"

# --- vocabulary --------------------------------------------------------------

# Determiners and quantifiers, ca → es.
DETS = [
    ("el", "el"), ("la", "la"), ("els", "los"), ("les", "las"),
    ("un", "un"), ("una", "una"), ("uns", "unos"), ("unes", "unas"),
    ("aquest", "este"), ("aquesta", "esta"), ("aquests", "estos"), ("aquestes", "estas"),
    ("aquell", "aquel"), ("aquella", "aquella"), ("aquells", "aquellos"), ("aquelles", "aquellas"),
    ("cada", "cada"), ("tot", "todo"), ("tota", "toda"), ("tots", "todos"), ("totes", "todas"),
    ("algun", "algún"), ("alguna", "alguna"), ("alguns", "algunos"), ("algunes", "algunas"),
    ("molts", "muchos"), ("moltes", "muchas"), ("pocs", "pocos"), ("poques", "pocas"),
    ("qualsevol", "cualquier"),
]

# Nouns, ca → es.
NOUNS = [
    ("casa", "casa"), ("home", "hombre"), ("dona", "mujer"), ("nen", "niño"),
    ("nena", "niña"), ("noi", "chico"), ("noia", "chica"), ("amic", "amigo"),
    ("amiga", "amiga"), ("amics", "amigos"), ("amigues", "amigas"), ("gos", "perro"),
    ("gat", "gato"), ("cavall", "caballo"), ("ocell", "pájaro"), ("taula", "mesa"),
    ("cadira", "silla"), ("llit", "cama"), ("porta", "puerta"), ("finestra", "ventana"),
    ("paret", "pared"), ("sostre", "techo"), ("carrer", "calle"), ("ciutat", "ciudad"),
    ("poble", "pueblo"), ("país", "país"), ("món", "mundo"), ("terra", "tierra"),
    ("mar", "mar"), ("muntanya", "montaña"), ("riu", "río"), ("platja", "playa"),
    ("bosc", "bosque"), ("arbre", "árbol"), ("flor", "flor"), ("fulla", "hoja"),
    ("fruita", "fruta"), ("poma", "manzana"), ("taronja", "naranja"), ("raïm", "uva"),
    ("menjar", "comida"), ("aigua", "agua"), ("vi", "vino"), ("pa", "pan"),
    ("llet", "leche"), ("formatge", "queso"), ("carn", "carne"), ("peix", "pescado"),
    ("ou", "huevo"), ("cafè", "café"), ("sucre", "azúcar"), ("sal", "sal"),
    ("oli", "aceite"), ("llibre", "libro"), ("paper", "papel"), ("llapis", "lápiz"),
    ("escola", "escuela"), ("mestre", "maestro"), ("alumne", "alumno"), ("classe", "clase"),
    ("lliçó", "lección"), ("deures", "deberes"), ("feina", "trabajo"), ("empresa", "empresa"),
    ("oficina", "oficina"), ("reunió", "reunión"), ("projecte", "proyecto"), ("informe", "informe"),
    ("carta", "carta"), ("missatge", "mensaje"), ("telèfon", "teléfono"), ("ordinador", "ordenador"),
    ("pantalla", "pantalla"), ("teclat", "teclado"), ("xarxa", "red"), ("programa", "programa"),
    ("música", "música"), ("cançó", "canción"), ("veu", "voz"), ("so", "sonido"),
    ("silenci", "silencio"), ("paraula", "palabra"), ("frase", "frase"), ("llengua", "lengua"),
    ("idioma", "idioma"), ("història", "historia"), ("conte", "cuento"), ("notícia", "noticia"),
    ("diari", "periódico"), ("revista", "revista"), ("foto", "foto"), ("imatge", "imagen"),
    ("pel·lícula", "película"), ("teatre", "teatro"), ("cinema", "cine"), ("festa", "fiesta"),
    ("joc", "juego"), ("esport", "deporte"), ("partit", "partido"), ("equip", "equipo"),
    ("camp", "campo"), ("pilota", "pelota"), ("temps", "tiempo"), ("dia", "día"),
    ("nit", "noche"), ("matí", "mañana"), ("tarda", "tarde"), ("setmana", "semana"),
    ("mes", "mes"), ("any", "año"), ("hora", "hora"), ("minut", "minuto"),
    ("estiu", "verano"), ("hivern", "invierno"), ("primavera", "primavera"), ("tardor", "otoño"),
    ("pluja", "lluvia"), ("neu", "nieve"), ("vent", "viento"), ("sol", "sol"),
    ("lluna", "luna"), ("estrella", "estrella"), ("cel", "cielo"), ("núvol", "nube"),
    ("foc", "fuego"), ("llum", "luz"), ("ombra", "sombra"), ("color", "color"),
    ("cor", "corazón"), ("mà", "mano"), ("peu", "pie"), ("ull", "ojo"),
    ("orella", "oreja"), ("boca", "boca"), ("nas", "nariz"), ("cabell", "pelo"),
    ("cos", "cuerpo"), ("salut", "salud"), ("metge", "médico"), ("hospital", "hospital"),
    ("malaltia", "enfermedad"), ("medicina", "medicina"), ("família", "familia"), ("pare", "padre"),
    ("mare", "madre"), ("fill", "hijo"), ("filla", "hija"), ("germà", "hermano"),
    ("germana", "hermana"), ("avi", "abuelo"), ("àvia", "abuela"), ("oncle", "tío"),
    ("tia", "tía"), ("cosí", "primo"), ("veí", "vecino"), ("gent", "gente"),
    ("persona", "persona"), ("grup", "grupo"), ("govern", "gobierno"), ("president", "presidente"),
    ("ministre", "ministro"), ("llei", "ley"), ("dret", "derecho"), ("justícia", "justicia"),
    ("guerra", "guerra"), ("pau", "paz"), ("diners", "dinero"), ("preu", "precio"),
    ("mercat", "mercado"), ("botiga", "tienda"), ("compra", "compra"), ("venda", "venta"),
    ("cotxe", "coche"), ("tren", "tren"), ("avió", "avión"), ("vaixell", "barco"),
    ("bicicleta", "bicicleta"), ("viatge", "viaje"), ("camí", "camino"), ("pont", "puente"),
    ("estació", "estación"), ("aeroport", "aeropuerto"), ("hotel", "hotel"), ("habitació", "habitación"),
    ("cuina", "cocina"), ("bany", "baño"), ("jardí", "jardín"), ("pis", "piso"),
    ("edifici", "edificio"), ("església", "iglesia"), ("plaça", "plaza"), ("parc", "parque"),
    ("museu", "museo"), ("biblioteca", "biblioteca"), ("universitat", "universidad"), ("ciència", "ciencia"),
    ("art", "arte"), ("pintura", "pintura"), ("dibuix", "dibujo"), ("pregunta", "pregunta"),
    ("resposta", "respuesta"), ("problema", "problema"), ("solució", "solución"), ("idea", "idea"),
    ("pensament", "pensamiento"), ("raó", "razón"), ("veritat", "verdad"), ("mentida", "mentira"),
    ("alegria", "alegría"), ("tristesa", "tristeza"), ("amor", "amor"), ("vida", "vida"),
    ("mort", "muerte"), ("nom", "nombre"), ("cognom", "apellido"), ("número", "número"),
    ("lletra", "letra"), ("exemple", "ejemplo"), ("manera", "manera"), ("forma", "forma"),
    ("part", "parte"), ("lloc", "lugar"), ("centre", "centro"), ("final", "final"),
    ("principi", "principio"), ("moment", "momento"), ("cas", "caso"), ("cosa", "cosa"),
    ("objecte", "objeto"), ("màquina", "máquina"), ("eina", "herramienta"), ("clau", "llave"),
    ("roba", "ropa"), ("sabata", "zapato"), ("camisa", "camisa"), ("barret", "sombrero"),
]

# Adjectives, ca → es.
ADJS = [
    ("gran", "grande"), ("petit", "pequeño"), ("petita", "pequeña"), ("nou", "nuevo"),
    ("nova", "nueva"), ("vell", "viejo"), ("vella", "vieja"), ("jove", "joven"),
    ("bo", "bueno"), ("bona", "buena"), ("dolent", "malo"), ("dolenta", "mala"),
    ("bonic", "bonito"), ("bonica", "bonita"), ("lleig", "feo"), ("lletja", "fea"),
    ("alt", "alto"), ("alta", "alta"), ("baix", "bajo"), ("baixa", "baja"),
    ("llarg", "largo"), ("llarga", "larga"), ("curt", "corto"), ("curta", "corta"),
    ("ample", "ancho"), ("estret", "estrecho"), ("fort", "fuerte"), ("feble", "débil"),
    ("ràpid", "rápido"), ("ràpida", "rápida"), ("lent", "lento"), ("lenta", "lenta"),
    ("calent", "caliente"), ("fred", "frío"), ("freda", "fría"), ("blanc", "blanco"),
    ("blanca", "blanca"), ("negre", "negro"), ("negra", "negra"), ("vermell", "rojo"),
    ("vermella", "roja"), ("blau", "azul"), ("blava", "azul"), ("verd", "verde"),
    ("verda", "verde"), ("groc", "amarillo"), ("groga", "amarilla"), ("clar", "claro"),
    ("clara", "clara"), ("fosc", "oscuro"), ("fosca", "oscura"), ("important", "importante"),
    ("interessant", "interesante"), ("difícil", "difícil"), ("fàcil", "fácil"), ("possible", "posible"),
    ("impossible", "imposible"), ("necessari", "necesario"), ("necessària", "necesaria"), ("lliure", "libre"),
    ("ple", "lleno"), ("plena", "llena"), ("buit", "vacío"), ("buida", "vacía"),
    ("obert", "abierto"), ("oberta", "abierta"), ("tancat", "cerrado"), ("tancada", "cerrada"),
    ("content", "contento"), ("contenta", "contenta"), ("trist", "triste"), ("cansat", "cansado"),
    ("cansada", "cansada"), ("malalt", "enfermo"), ("malalta", "enferma"), ("ric", "rico"),
    ("rica", "rica"), ("pobre", "pobre"), ("car", "caro"), ("barat", "barato"),
    ("barata", "barata"), ("primer", "primero"), ("primera", "primera"), ("darrer", "último"),
    ("darrera", "última"), ("únic", "único"), ("única", "única"), ("mateix", "mismo"),
    ("mateixa", "misma"), ("altre", "otro"), ("altra", "otra"), ("públic", "público"),
    ("pública", "pública"), ("privat", "privado"), ("privada", "privada"), ("nacional", "nacional"),
    ("internacional", "internacional"), ("local", "local"), ("general", "general"), ("especial", "especial"),
    ("principal", "principal"), ("polític", "político"), ("econòmic", "económico"), ("econòmica", "económica"),
    ("social", "social"), ("cultural", "cultural"), ("natural", "natural"), ("normal", "normal"),
    ("estrany", "extraño"), ("estranya", "extraña"), ("seriós", "serio"), ("seriosa", "seria"),
    ("tranquil", "tranquilo"), ("tranquil·la", "tranquila"), ("perfecte", "perfecto"), ("perfecta", "perfecta"),
    ("català", "catalán"), ("catalana", "catalana"), ("espanyol", "español"), ("espanyola", "española"),
    ("meu", "mi"), ("meva", "mi"), ("teu", "tu"), ("teva", "tu"),
    ("seu", "su"), ("seva", "su"), ("nostre", "nuestro"), ("nostra", "nuestra"),
]

# Catalan function words and frequent verb forms (language-id evidence).
CA_FUNCTION = """
i és són era eren està estan estic estàs estem esteu hi ho em et ens us li
molt més menys també tampoc però perquè què qui quan on com amb sense sota
dins fora davant darrere després abans avui ahir demà ara aviat tard sempre
mai encara ja aquí allà això allò fer faig fas fa fem feu fan anar vaig vas
anem aneu venir vinc véns ve venim veniu vénen tenir tinc tens té tenim teniu
tenen haver hem heu ser sóc ets som sou dir dic dius diu diem dieu diuen
poder puc pots pot podem podeu poden voler vull vols vol volem voleu volen
saber saps sap sabem sabeu veure veig veus veiem veieu veuen donar dono dóna
donem doneu donen parlar parlo parles parlem parleu parlen gaire gairebé
potser doncs mentre malgrat tanmateix nosaltres vosaltres vostè vostès
aquesta aquestes meves teves seves alguna cosa res ningú tothom cap fins
"""

# Spanish function words and frequent verb forms.
ES_FUNCTION = """
y o los las unos unas con por para sin bajo desde hasta hacia según durante
es son era eran está están estoy estás estamos estáis soy eres somos sois
fue fueron hay hacer hago haces hace hacemos hacéis hacen ir voy vais vamos
vengo vienes viene venimos venís vienen tener tengo tienes tiene tenemos
tenéis tienen decir digo dices dice decimos decís dicen puedo puedes puede
podemos podéis pueden querer quiero quieres quiere queremos queréis quieren
sabes sabe sabemos sabéis saben ver veo vemos veis ven dar doy das da damos
dais dan hablar hablo hablas habla hablamos habláis hablan luego entonces
ahora hoy ayer siempre nunca todavía aquí ahí allí esto eso aquello este
esta estos estas ese esa esos esas muy también tampoco pero porque qué quién
cuándo dónde cómo cuál mucho mucha muchos muchas poco poca pocos pocas todo
toda todos todas algo alguien nada nadie mismo misma otro otra otros otras
nosotros vosotros ellos ellas usted ustedes mis tus sus nuestro nuestra
vuestro vuestra gracias bien mejor peor después antes cuando donde como
"""

# Published WER matrix: experiment → decoding tokens → per-dataset values.
WER_DATASETS = ["TV3", "ParlamentParla", "Corts"]
WER_MATRIX = {
    "base": {
        "": (31.96, 20.96, 35.43),
        "ca,es": (25.12, 22.39, 29.81),
        "es,ca": (25.49, 20.13, 34.16),
        "ca": (26.67, 22.17, 30.34),
        "es": (63.16, 57.87, 52.16),
    },
    "synthetic": {
        "ca,es": (23.22, 16.38, 22.82),
        "es,ca": (23.81, 15.47, 22.71),
        "ca": (23.46, 14.48, 22.42),
        "es": (24.23, 15.72, 23.76),
    },
    "tv3": {
        "ca,es": (21.96, 15.76, 23.98),
        "es,ca": (21.46, 16.65, 24.86),
        "ca": (21.20, 16.01, 24.22),
        "es": (51.29, 50.58, 47.75),
    },
    "tuples": {
        "ca,es": (28.99, 17.83, 25.24),
        "es,ca": (29.92, 21.37, 29.72),
        "ca": (31.42, 18.31, 26.06),
        "es": (52.78, 50.22, 47.32),
    },
}


def catalan_words() -> set[str]:
    words = set(CA_FUNCTION.split())
    words.update(ca for ca, _ in DETS)
    words.update(ca for ca, _ in NOUNS)
    words.update(ca for ca, _ in ADJS)
    return words


def spanish_words() -> set[str]:
    words = set(ES_FUNCTION.split())
    words.update(es for _, es in DETS)
    words.update(es for _, es in NOUNS)
    words.update(es for _, es in ADJS)
    return words


def ngram_log_odds(ca: set[str], es: set[str]) -> dict[str, float]:
    """Add-one-smoothed log odds of each 2-/3-gram, Catalan over Spanish."""

    def grams(words: set[str]) -> Counter:
        counts: Counter = Counter()
        for word in words:
            for n in (2, 3):
                for i in range(len(word) - n + 1):
                    counts[word[i : i + n]] += 1
        return counts

    ca_counts, es_counts = grams(ca), grams(es)
    vocabulary = set(ca_counts) | set(es_counts)
    ca_total = sum(ca_counts.values()) + len(vocabulary)
    es_total = sum(es_counts.values()) + len(vocabulary)
    return {
        gram: math.log((ca_counts[gram] + 1) / ca_total) - math.log((es_counts[gram] + 1) / es_total)
        for gram in vocabulary
    }


def write_lines(path: Path, lines: list[str]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("".join(line + "\n" for line in lines), encoding="utf-8")
    print(f"wrote {path} ({len(lines)} lines)")


def main() -> None:
    ca, es = catalan_words(), spanish_words()
    write_lines(DATA_DIR / "lexicon" / "ca.txt", sorted(ca))
    write_lines(DATA_DIR / "lexicon" / "es.txt", sorted(es))
    weights = ngram_log_odds(ca, es)
    write_lines(
        DATA_DIR / "lexicon" / "ngrams.tsv",
        [f"{gram}\t{weight:.6f}" for gram, weight in sorted(weights.items())],
    )

    pos: dict[str, str] = {}
    for word, _ in DETS:
        pos.setdefault(word, "DET")
    for word, _ in NOUNS:
        pos.setdefault(word, "NOUN")
    for word, _ in ADJS:
        pos.setdefault(word, "ADJ")
    write_lines(
        DATA_DIR / "pos" / "ca_pos.tsv",
        [f"{word}\t{tag}" for word, tag in sorted(pos.items())],
    )

    translations: dict[str, str] = {}
    for word, translated in [*DETS, *NOUNS, *ADJS]:
        translations.setdefault(word, translated)
    write_lines(
        DATA_DIR / "dict" / "ca_es.tsv",
        [f"{word}\t{translated}" for word, translated in sorted(translations.items())],
    )

    records = []
    for experiment, rows in WER_MATRIX.items():
        for tokens, values in rows.items():
            decoding = [t for t in tokens.split(",") if t]
            for dataset, wer_pct in zip(WER_DATASETS, values):
                records.append(
                    {
                        "experiment": experiment,
                        "decoding_tokens": decoding,
                        "dataset": dataset,
                        "wer_pct": wer_pct,
                    }
                )
    write_lines(
        DATA_DIR / "published_wer.jsonl",
        [json.dumps(record, ensure_ascii=False) for record in records],
    )


if __name__ == "__main__":
    main()
